use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bridging-heat", version, about = "Heat flow, kernels and scattering for the bridging inverse-square operator")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Values stay textual here; validation happens in one place, shared with
/// configuration files.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Singularity strength in [0, 1)
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// Time points, comma separated
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// gaussian:center,width[,momentum] or indicator:lo,hi
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub datum: Option<String>,
    /// Half-length of the spatial domain
    #[arg(long = "grid-L", global = true)]
    pub grid_l: Option<String>,
    /// talbot or vertical
    #[arg(long, global = true)]
    pub contour: Option<String>,
    /// Initial number of contour nodes
    #[arg(long, global = true)]
    pub nodes: Option<String>,
    /// calibrated or verbatim
    #[arg(long, global = true)]
    pub kappa: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Heat kernel K(t; x, y) on the product of the x and y lists
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Evolve the datum to every requested time
    Evolve,
    /// Transmission and reflection of the type-II family
    Scatter {
        /// Coupling `re` or `re,im`
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        #[arg(long)]
        energies: Option<String>,
    },
    /// Boundary traces of the evolved datum and their residuals
    BcCheck,
    /// Decay-rate fits for the classical and bridging flows
    Decay,
    /// Reproduce one of the figure presets
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
    /// Run the built-in checks
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureName {
    pub fn name(self) -> &'static str {
        match self {
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel { .. } => "kernel",
            Command::Evolve => "evolve",
            Command::Scatter { .. } => "scatter",
            Command::BcCheck => "bc-check",
            Command::Decay => "decay",
            Command::Figure { .. } => "figure",
            Command::Selftest => "selftest",
        }
    }
}

impl Cli {
    /// `(key, value)` pairs in configuration-file spelling.
    pub fn flag_values(&self) -> Vec<(&'static str, Option<&String>)> {
        let c = &self.common;
        let mut flags = vec![
            ("alpha", c.alpha.as_ref()),
            ("t", c.t.as_ref()),
            ("datum", c.datum.as_ref()),
            ("grid-L", c.grid_l.as_ref()),
            ("contour", c.contour.as_ref()),
            ("nodes", c.nodes.as_ref()),
            ("kappa", c.kappa.as_ref()),
            ("out", c.out.as_ref()),
        ];
        match &self.command {
            Command::Kernel { x, y } => flags.extend([("x", x.as_ref()), ("y", y.as_ref())]),
            Command::Scatter { a, gamma, energies } => {
                flags.extend([("a", a.as_ref()), ("gamma", gamma.as_ref()), ("energies", energies.as_ref())])
            }
            _ => {}
        }
        flags
    }
}
