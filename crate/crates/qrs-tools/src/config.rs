//! TOML configuration: noise model, sweep grid and code specification.
//!
//! Every table rejects unknown keys so that a misspelt rate fails loudly
//! instead of silently falling back to its default.

use std::path::{Path, PathBuf};

use qrs_core::frontier::Grid;
use qrs_core::noise::{Condition, InstructionRates, PostSelection, ReductionTable};
use qrs_core::{FieldCtx, FieldElement};
use serde::Deserialize;

use crate::error::{read_text, Result, ToolError};

/// Starting point for the instruction rates before `[rates]` overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Rates at physical error rate 10⁻³.
    #[default]
    Default,
    /// Default rates with the morphing idle circuit.
    Morphing,
    /// All error rates zero.
    Noiseless,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesFile {
    p_half: Option<f64>,
    p_whole: Option<f64>,
    p_inter: Option<f64>,
    p_idle: Option<f64>,
    tau_meas: Option<f64>,
    tau_idle: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionFile {
    #[serde(default)]
    r_half: f64,
    #[serde(default)]
    r_whole: f64,
    #[serde(default)]
    r_inter: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostSelectionFile {
    #[serde(default)]
    c1: ConditionFile,
    #[serde(default)]
    c2: ConditionFile,
    #[serde(default)]
    c3: ConditionFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReductionFile {
    #[serde(default)]
    half: Vec<(f64, f64)>,
    #[serde(default)]
    whole: Vec<(f64, f64)>,
    #[serde(default)]
    inter: Vec<(f64, f64)>,
}

/// A parameter axis: an explicit list or an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Axis {
    List(Vec<usize>),
    Range { from: usize, to: usize },
}

impl Axis {
    fn values(&self, name: &str) -> Result<Vec<usize>> {
        let v: Vec<usize> = match self {
            Axis::List(v) => v.clone(),
            Axis::Range { from, to } => (*from..=*to).collect(),
        };
        if v.is_empty() {
            return Err(ToolError::config(format!("grid axis `{name}` is empty")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    n: Option<Axis>,
    m: Option<Axis>,
    d: Option<Axis>,
    big_m: Option<Axis>,
    r: Option<Axis>,
    max_physical: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    preset: Preset,
    #[serde(default)]
    rates: RatesFile,
    #[serde(default)]
    post_selection: PostSelectionFile,
    #[serde(default)]
    reduction: ReductionFile,
    #[serde(default)]
    grid: GridFile,
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rates: InstructionRates,
    pub post_selection: PostSelection,
    pub grid: Grid,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rates: InstructionRates::default(),
            post_selection: PostSelection::trivial(),
            grid: Grid::default(),
        }
    }
}

impl RunConfig {
    /// Parse configuration text; absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(ToolError::config)?;
        let mut rates = match file.preset {
            Preset::Default => InstructionRates::default(),
            Preset::Morphing => InstructionRates::morphing(),
            Preset::Noiseless => InstructionRates::noiseless(),
        };
        let r = &file.rates;
        for (slot, value) in [
            (&mut rates.p_half, r.p_half),
            (&mut rates.p_whole, r.p_whole),
            (&mut rates.p_inter, r.p_inter),
            (&mut rates.p_idle, r.p_idle),
            (&mut rates.tau_meas, r.tau_meas),
            (&mut rates.tau_idle, r.tau_idle),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        rates.validate().map_err(ToolError::config)?;

        let cond = |c: ConditionFile| Condition { r_half: c.r_half, r_whole: c.r_whole, r_inter: c.r_inter };
        let ps = &file.post_selection;
        let table = |points: &[(f64, f64)]| ReductionTable::new(points.to_vec()).map_err(ToolError::config);
        let post_selection = PostSelection {
            conditions: [cond(ps.c1), cond(ps.c2), cond(ps.c3)],
            reduction: [
                table(&file.reduction.half)?,
                table(&file.reduction.whole)?,
                table(&file.reduction.inter)?,
            ],
        };
        post_selection.validate().map_err(ToolError::config)?;

        let mut grid = Grid::default();
        let g = &file.grid;
        for (slot, axis, name) in [
            (&mut grid.n, &g.n, "n"),
            (&mut grid.m, &g.m, "m"),
            (&mut grid.d, &g.d, "d"),
            (&mut grid.big_m, &g.big_m, "big_m"),
            (&mut grid.r, &g.r, "r"),
        ] {
            if let Some(a) = axis {
                *slot = a.values(name)?;
            }
        }
        if let Some(cap) = g.max_physical {
            grid.max_physical = cap;
        }
        Ok(RunConfig { rates, post_selection, grid })
    }

    /// Load from a file, or the defaults when no path is given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::parse(&read_text(p)?)
                .map_err(|e| ToolError::config(format!("{}: {e}", p.display()))),
            None => Ok(Self::default()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    n: usize,
    d: usize,
    alpha: Option<Vec<u64>>,
    points: Option<PathBuf>,
    v: Option<Vec<u64>>,
}

/// A quantum Reed–Solomon code: length, distance, evaluation points and
/// column multipliers (all ones unless given).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub d: usize,
    pub alpha: Vec<FieldElement>,
    pub v: Vec<FieldElement>,
}

impl CodeSpec {
    /// Parse a code file. Points come either inline (`alpha = [...]`) or
    /// from a points file (`points = "path"`, relative to `base`).
    pub fn parse(ctx: &FieldCtx, text: &str, base: &Path) -> Result<Self> {
        let file: CodeFile = toml::from_str(text).map_err(ToolError::config)?;
        let elems = |xs: &[u64]| -> Result<Vec<FieldElement>> {
            xs.iter().map(|&x| ctx.elem(x).map_err(ToolError::config)).collect()
        };
        let alpha = match (&file.alpha, &file.points) {
            (Some(a), None) => elems(a)?,
            (None, Some(p)) => {
                let path = base.join(p);
                qrs_core::grs::parse_points_file(ctx, &read_text(&path)?)
                    .map_err(|e| ToolError::config(format!("{}: {e}", path.display())))?
            }
            _ => return Err(ToolError::config("give exactly one of `alpha` and `points`")),
        };
        let v = match &file.v {
            Some(v) => elems(v)?,
            None => vec![FieldElement::ONE; file.n],
        };
        if alpha.len() != file.n || v.len() != file.n {
            return Err(ToolError::config(format!(
                "code length {} but {} points and {} multipliers",
                file.n,
                alpha.len(),
                v.len()
            )));
        }
        Ok(CodeSpec { n: file.n, d: file.d, alpha, v })
    }

    pub fn load(ctx: &FieldCtx, path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(ctx, &read_text(path)?, base)
            .map_err(|e| match e {
                ToolError::Config(msg) => ToolError::config(format!("{}: {msg}", path.display())),
                other => other,
            })
    }
}
