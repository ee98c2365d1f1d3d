use clap::{Parser, Subcommand, ValueEnum};

use crate::config::CommonArgs;

#[derive(Debug, Parser)]
#[command(name = "logthh", version, about = "Exact F_p computations for logarithmic THH", propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cyclic,
    Replete,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The category J.
    Jcat {
        #[command(subcommand)]
        cmd: JcatCmd,
    },
    /// Graded commutative monoids.
    Monoid {
        #[command(subcommand)]
        cmd: MonoidCmd,
    },
    /// Cyclic and replete bar constructions.
    Bar {
        #[command(subcommand)]
        cmd: BarCmd,
    },
    /// Homology of the fixed complexes.
    Homology {
        #[command(subcommand)]
        cmd: HomologyCmd,
    },
    /// Truncated J-spaces and their homotopy colimits.
    Hocolim {
        #[command(subcommand)]
        cmd: HocolimCmd,
    },
    /// Tor spectral sequences.
    Specseq {
        #[command(subcommand)]
        cmd: SpecseqCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum JcatCmd {
    /// Size of J(a, b).
    HomCount {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Every morphism a → b.
    Homs {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Connected components of a truncation, one per degree.
    Components,
}

#[derive(Debug, Subcommand)]
pub enum MonoidCmd {
    /// Presentation, grading and element counts per degree.
    Show {
        /// A name (free1, dN:2, dZ:3, z, trivial), inline JSON, or @file.
        #[arg(long, default_value = "free1")]
        monoid: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum BarCmd {
    /// Homology dimensions per weight and degree.
    Homology {
        #[arg(long, default_value = "free1")]
        monoid: String,
        #[arg(long, value_enum, default_value = "cyclic")]
        kind: Kind,
    },
    /// Ranks of the repletion map on homology.
    Repletion {
        #[arg(long, default_value = "free1")]
        monoid: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum HomologyCmd {
    /// Homology of a named complex: ez2, c, bcy, brep.
    Complex {
        #[arg(long)]
        complex: String,
        /// Scale for `c`.
        #[arg(long, default_value_t = 1)]
        d: i64,
        #[arg(long, default_value = "free1")]
        monoid: String,
    },
    /// Degreewise check that C(d) is the pushout of the nerve of EZ/2.
    Pushout {
        #[arg(long, default_value_t = 1)]
        d: i64,
    },
    /// Homology of a bar window across increasing bounds.
    Stabilize {
        #[arg(long, default_value = "free1")]
        monoid: String,
        #[arg(long, value_enum, default_value = "replete")]
        kind: Kind,
        /// Comma-separated increasing bounds.
        #[arg(long, default_value = "2,3,4")]
        bounds: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum HocolimCmd {
    /// Sizes of X(n) for every object of the truncation.
    Values {
        /// empty, terminal, unit, free:d1,d2[:k] or freecomm:d1,d2:k.
        #[arg(long)]
        space: String,
    },
    /// Homology of the nerve of the category of elements.
    Nerve {
        #[arg(long)]
        space: String,
        /// Use every element instead of one per automorphism orbit.
        #[arg(long)]
        full: bool,
    },
    /// Freeness of the second-variable symmetric group actions.
    SigmaFree {
        #[arg(long)]
        space: String,
    },
    /// Injectivity of every latching map.
    Latching {
        #[arg(long)]
        space: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpecseqCmd {
    /// Pages from E² to E^∞ and the abutment verdict.
    Run {
        /// JSON list of differential rules replacing the scenario's own.
        #[arg(long)]
        rules: Option<std::path::PathBuf>,
    },
    /// Exhaustive search over the candidate differentials.
    Solve,
    /// Deletes each differential in turn and reports what breaks.
    Mutate,
}
