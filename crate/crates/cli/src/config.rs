use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use orbitcoh::{dold_presentation, sphere_presentation, wall_presentation, AlgebraPresentation, BorelFiber};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    /// One JSON object per line.
    Structured,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Fiber: `wall M N`, `dold M N`, `sphere N` or `file PATH`.
    #[arg(required = true, num_args = 2..=3, value_name = "FIBER")]
    pub fiber: Vec<String>,
    /// Dimension of the manifold; defaults to the fiber top degree.
    #[arg(long)]
    pub dim_x: Option<u32>,
    /// Take the induced action on mod 2 cohomology to be trivial.
    #[arg(long)]
    pub assume_trivial_action: bool,
    /// Number of base columns; at least dim X + fiber top degree + 3.
    #[arg(long, value_name = "N")]
    pub window: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Fail instead of annotating relations that hold only in the associated graded ring.
    #[arg(long)]
    pub strict_extensions: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberSpec {
    Wall { m: u32, n: u32 },
    Dold { m: u32, n: u32 },
    Sphere { n: u32 },
    File(PathBuf),
}

impl FiberSpec {
    pub fn parse(words: &[String]) -> Result<Self, CliError> {
        let num = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| CliError::Usage(format!("expected a nonnegative integer, found `{s}`")))
        };
        let spec = match words {
            [kind, m, n] if kind == "wall" => Self::Wall { m: num(m)?, n: num(n)? },
            [kind, m, n] if kind == "dold" => Self::Dold { m: num(m)?, n: num(n)? },
            [kind, n] if kind == "sphere" => Self::Sphere { n: num(n)? },
            [kind, path] if kind == "file" => Self::File(PathBuf::from(path)),
            _ => {
                return Err(CliError::Usage(format!(
                    "unrecognised fiber `{}`; expected `wall M N`, `dold M N`, `sphere N` or `file PATH`",
                    words.join(" ")
                )))
            }
        };
        match spec {
            Self::Wall { m: 0, .. } => Err(CliError::Usage("wall manifolds need M >= 1".into())),
            Self::Sphere { n: 0 } => Err(CliError::Usage("spheres need N >= 1".into())),
            Self::Dold { m: 0, n: 0 } => Err(CliError::Usage("dold 0 0 is a point".into())),
            other => Ok(other),
        }
    }

    pub fn presentation(&self) -> Result<AlgebraPresentation, CliError> {
        Ok(match self {
            Self::Wall { m, n } => wall_presentation(*m, *n),
            Self::Dold { m, n } => dold_presentation(*m, *n),
            Self::Sphere { n } => sphere_presentation(*n),
            Self::File(path) => read_presentation(path)?,
        })
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Self::File(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Wall { m, n } => format!("wall {m} {n}"),
            Self::Dold { m, n } => format!("dold {m} {n}"),
            Self::Sphere { n } => format!("sphere {n}"),
            Self::File(path) => format!("file {}", path.display()),
        }
    }
}

pub fn read_presentation(path: &PathBuf) -> Result<AlgebraPresentation, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    AlgebraPresentation::parse(&text).map_err(|e| CliError::Presentation {
        path: path.clone(),
        source: e,
    })
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub fiber: FiberSpec,
    pub presentation: AlgebraPresentation,
    pub dim_x: u32,
    pub assume_trivial_action: bool,
    pub p_window_override: Option<u32>,
    pub output: OutputFormat,
    pub strict_extensions: bool,
}

impl JobConfig {
    pub fn from_args(args: &JobArgs) -> Result<Self, CliError> {
        let fiber = FiberSpec::parse(&args.fiber)?;
        let presentation = fiber.presentation()?;
        let top = presentation.top_degree();
        let dim_x = match (args.dim_x, top) {
            (_, None) => {
                return Err(CliError::Usage(
                    "the fiber presentation is infinite-dimensional; every generator needs a pure-power relation".into(),
                ))
            }
            (None, Some(top)) => top,
            (Some(d), Some(top)) if fiber.is_builtin() && d != top => {
                return Err(CliError::Usage(format!(
                    "--dim-x must equal {top} for the built-in fiber {}",
                    fiber.describe()
                )))
            }
            (Some(d), Some(_)) => d,
        };
        Ok(Self {
            fiber,
            presentation,
            dim_x,
            assume_trivial_action: args.assume_trivial_action,
            p_window_override: args.window,
            output: args.format,
            strict_extensions: args.strict_extensions,
        })
    }

    pub fn borel_fiber(&self) -> Result<BorelFiber, CliError> {
        let fiber = BorelFiber::new(self.presentation.clone(), self.dim_x, self.assume_trivial_action)
            .map_err(|e| match e {
                orbitcoh::EngineError::HypothesisRequired => CliError::Usage(format!(
                    "{e}; rerun with --assume-trivial-action (see `orbitcoh actions {}`)",
                    self.fiber.describe()
                )),
                other => CliError::Engine(other),
            })?;
        match self.p_window_override {
            Some(w) => Ok(fiber.with_window(w)?),
            None => Ok(fiber),
        }
    }
}
