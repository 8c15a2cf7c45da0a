use crate::args::GenerateArgs;
use crate::CliError;
use capkm_core::{gen_instance, save_instance, CapacityMode, CostMode, Layout};

/// Parses `lo:hi`.
pub fn parse_range(text: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Usage(format!("expected LO:HI, got `{text}`"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let capacity = match (args.uniform_cap, &args.nonuniform_cap) {
        (Some(u), None) => CapacityMode::Uniform(u),
        (None, Some(r)) => {
            let (lo, hi) = parse_range(r)?;
            CapacityMode::Nonuniform { lo, hi }
        }
        _ => return Err(CliError::Usage("give exactly one of --uniform-cap and --nonuniform-cap".into())),
    };
    let cost = match &args.cost {
        None => CostMode::Zero,
        Some(r) => {
            let (lo, hi) = parse_range(r)?;
            CostMode::Range { lo, hi }
        }
    };
    let layout = match args.clusters {
        None => Layout::Uniform,
        Some(clusters) => Layout::Clustered { clusters, spread: args.spread },
    };
    let inst = gen_instance(args.clients, args.facilities, args.k, layout, capacity, cost, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(save_instance(&inst))
}
