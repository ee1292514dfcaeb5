//! Turning config knobs into engine method specifications.
//!
//! The basis families get their lattice domain extended beyond the
//! observation window to push boundary effects away from the area of
//! interest, while the configured node count stays fixed, so the cost of a
//! method does not balloon with the correlation range. Kernel lattices and
//! tapers operate on the window itself.

use matfield::basis::{BasisFamily, BasisSpec};
use matfield::convolution::make_convolution;
use matfield::kriging::MethodSpec;
use matfield::matern::MaternParams;
use matfield::precision::CInvMode;
use matfield::taper::{select_taper_kind, TaperSpec};
use matfield::{BoundingBox, Error};

use crate::config::{ExperimentConfig, MethodName, MethodsConfig};
use crate::error::Result;

/// A method ready to run, or the reason it cannot run for this combination.
#[derive(Clone, Debug)]
pub enum BuiltMethod {
    Ready(MethodSpec),
    Skipped { reason: String },
}

/// Extends `region` by `margin` on every side and lays `nodes_per_axis`
/// functions over the enlarged domain. The count — and with it the cost of
/// every downstream factorization — stays exactly as configured; only the
/// lattice spacing stretches to cover the padding.
pub fn expanded_basis_spec(
    family: BasisFamily,
    region: &BoundingBox,
    nodes_per_axis: usize,
    margin: f64,
) -> Result<BasisSpec> {
    let overlap = family.support_cells() - 1;
    if nodes_per_axis <= overlap {
        return Err(Error::InvalidParameter(format!(
            "{nodes_per_axis} functions per axis is too few for this family"
        ))
        .into());
    }
    let lo: Vec<f64> = region.lo().iter().map(|&x| x - margin).collect();
    let hi: Vec<f64> = region.hi().iter().map(|&x| x + margin).collect();
    let nodes = vec![nodes_per_axis; region.dim()];
    Ok(BasisSpec::new(family, BoundingBox::new(lo, hi)?, &nodes)?)
}

/// Builds the engine spec for one method at one (nu, range) combination.
/// Combinations a method cannot serve (non-integer Markov order, singular
/// convolution kernel, no configured taper) come back as `Skipped` with a
/// human-readable reason for the output row.
pub fn build_method(
    name: MethodName,
    methods: &MethodsConfig,
    experiment: &ExperimentConfig,
    params: &MaternParams,
    range: f64,
) -> Result<BuiltMethod> {
    let region = experiment.domain_box();
    let margin = experiment.expansion_margin(range);
    match name {
        MethodName::Optimal => Ok(BuiltMethod::Ready(MethodSpec::Optimal)),
        MethodName::MarkovS1 | MethodName::MarkovS2 | MethodName::MarkovS3 => {
            let order = match name {
                MethodName::MarkovS1 => 1,
                MethodName::MarkovS2 => 2,
                _ => 3,
            };
            let family = BasisFamily::Spline { order };
            match markov_feasible(params) {
                Some(reason) => Ok(BuiltMethod::Skipped { reason }),
                None => {
                    let basis =
                        expanded_basis_spec(family, &region, methods.spline_nodes, margin)?;
                    Ok(BuiltMethod::Ready(MethodSpec::Markov {
                        basis,
                        c_inv: CInvMode::Lumped,
                    }))
                }
            }
        }
        MethodName::MarkovDb3 => match markov_feasible(params) {
            Some(reason) => Ok(BuiltMethod::Skipped { reason }),
            None => {
                let basis =
                    expanded_basis_spec(BasisFamily::Db3, &region, methods.db3_nodes, margin)?;
                Ok(BuiltMethod::Ready(MethodSpec::Markov {
                    basis,
                    c_inv: CInvMode::Identity,
                }))
            }
        },
        MethodName::Convolution => {
            let nu_kernel = params.nu / 2.0 - params.dim as f64 / 4.0;
            if nu_kernel <= 0.0 {
                return Ok(BuiltMethod::Skipped {
                    reason: format!(
                        "kernel singular: smoothness {} needs kernel smoothness {nu_kernel} > 0",
                        params.nu
                    ),
                });
            }
            match methods.convolution_for(params.nu) {
                None => Ok(BuiltMethod::Skipped {
                    reason: format!("no kernel lattice configured for nu={}", params.nu),
                }),
                Some(lattice) => {
                    let spec = make_convolution(params, &region, &lattice)?;
                    Ok(BuiltMethod::Ready(MethodSpec::Convolution(spec)))
                }
            }
        }
        MethodName::Taper => match methods.taper_for(params.nu) {
            None => Ok(BuiltMethod::Skipped {
                reason: format!("no taper range configured for nu={}", params.nu),
            }),
            Some(entry) => {
                let kind = match entry.kind {
                    Some(named) => named.to_kind(),
                    None => match select_taper_kind(params.nu) {
                        Ok(kind) => kind,
                        Err(err) => {
                            return Ok(BuiltMethod::Skipped {
                                reason: err.to_string(),
                            })
                        }
                    },
                };
                Ok(BuiltMethod::Ready(MethodSpec::Taper(TaperSpec::new(
                    kind,
                    entry.theta,
                )?)))
            }
        },
    }
}

/// `None` if the Markov construction applies, otherwise the reason it does
/// not (the order `nu + d/2` must be a supported integer).
fn markov_feasible(params: &MaternParams) -> Option<String> {
    match matfield::precision::alpha_for(params.nu, params.dim) {
        Ok(_) => None,
        Err(err) => Some(err.to_string()),
    }
}

/// Basis size of a ready method, when the notion applies.
pub fn spec_n_basis(spec: &MethodSpec) -> Option<usize> {
    match spec {
        MethodSpec::Optimal | MethodSpec::Taper(_) => None,
        MethodSpec::Markov { basis, .. } => Some(basis.n_basis()),
        MethodSpec::Convolution(conv) => Some(conv.n_basis()),
    }
}
