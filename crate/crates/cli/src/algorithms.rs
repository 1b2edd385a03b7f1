//! Algorithm names used in configs and on the command line.
//!
//! ```text
//! shade | bide | de[/<strategy>[/bin]]
//! mlcc[:opt,...] | variant-i..variant-iv[:opt,...]
//! opt = n=<real> | topg=<count|np> | sync
//! ```

use anyhow::{anyhow, bail, Result};
use mlcc::de_ops::MutationStrategy;
use mlcc::{Ablation, Algorithm, LayerSpec, MlccConfig, TopGOverride};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedAlgorithm {
    pub name: String,
    pub algorithm: Algorithm,
}

pub fn parse_layer(name: &str, cfg: &ExperimentConfig) -> Result<LayerSpec> {
    let spec = match name {
        "shade" => LayerSpec::Shade {
            memory_f: cfg.shade.memory_f,
            memory_cr: cfg.shade.memory_cr,
            history: cfg.shade.history,
            archive: cfg.shade.archive,
        },
        "bide" => LayerSpec::Bide {
            archive: cfg.bide.archive,
        },
        "de" => LayerSpec::fixed_de(cfg.fixed_de.strategy.parse()?, cfg.fixed_de.f, cfg.fixed_de.cr),
        other => {
            let Some(rest) = other.strip_prefix("de/") else {
                bail!("unknown layer `{other}`");
            };
            let strategy: MutationStrategy = rest.strip_suffix("/bin").unwrap_or(rest).parse()?;
            LayerSpec::fixed_de(strategy, cfg.fixed_de.f, cfg.fixed_de.cr)
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn ablation(head: &str) -> Option<Ablation> {
    Some(match head {
        "mlcc" => Ablation::Full,
        "variant-i" => Ablation::NoRab,
        "variant-ii" => Ablation::NoIpls,
        "variant-iii" => Ablation::Neither,
        "variant-iv" => Ablation::NoFitnessBias,
        _ => return None,
    })
}

pub fn parse_algorithm(name: &str, cfg: &ExperimentConfig) -> Result<NamedAlgorithm> {
    let (head, options) = match name.split_once(':') {
        Some((h, o)) => (h, Some(o)),
        None => (name, None),
    };
    let algorithm = match ablation(head) {
        Some(ablation) => {
            let layers = cfg
                .mlcc
                .layers
                .iter()
                .map(|l| parse_layer(l, cfg))
                .collect::<Result<Vec<_>>>()?;
            let mut mc = MlccConfig::new(layers)
                .with_n(cfg.mlcc.n)
                .with_ablation(ablation)
                .synchronous(cfg.mlcc.synchronous);
            for opt in options.into_iter().flat_map(|o| o.split(',')) {
                mc = apply_option(mc, opt.trim())?;
            }
            Algorithm::Mlcc(mc)
        }
        None => {
            if options.is_some() {
                bail!("options are only accepted by mlcc and its variants");
            }
            Algorithm::Single(parse_layer(head, cfg)?)
        }
    };
    algorithm.validate(cfg.population())?;
    Ok(NamedAlgorithm {
        name: name.to_string(),
        algorithm,
    })
}

fn apply_option(mc: MlccConfig, opt: &str) -> Result<MlccConfig> {
    if opt == "sync" {
        return Ok(mc.synchronous(true));
    }
    let (key, value) = opt
        .split_once('=')
        .ok_or_else(|| anyhow!("option `{opt}` is not key=value"))?;
    Ok(match key {
        "n" => mc.with_n(value.parse().map_err(|_| anyhow!("bad N `{value}`"))?),
        "topg" if value == "np" => mc.with_top_g(TopGOverride::All),
        "topg" => mc.with_top_g(TopGOverride::Count(
            value.parse().map_err(|_| anyhow!("bad top_G `{value}`"))?,
        )),
        _ => bail!("unknown option `{key}`"),
    })
}

/// A sweep entry such as `n=0.1` or `topg=np`, as an MLCC variant.
pub fn sweep_setting(setting: &str, cfg: &ExperimentConfig) -> Result<NamedAlgorithm> {
    parse_algorithm(&format!("mlcc:{setting}"), cfg)
}

/// File-system friendly form of an algorithm name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}
