//! JSON scenario configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::AgentState;
use crate::error::{Error, Result};
use crate::formation::FormationSpec;
use crate::gains::{recommended_schedule, GainSchedule, DEFAULT_ALPHA, DEFAULT_MARGIN};
use crate::geometry::{Orientation, Point};
use crate::graph::{build_lff, DirectedFormationGraph};
use crate::sim::{
    sample_initial, SampleBox, SimOptions, DEFAULT_DECIMATION, DEFAULT_EPS, DEFAULT_HORIZON, DEFAULT_STEP,
    DEFAULT_SUSTAIN,
};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub formation: FormationConfig,
    #[serde(default)]
    pub gains: GainPolicy,
    pub initial: InitialConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// Graph plus desired geometry. Give either `attachments` (one `[i, j]`
/// pair per agent 3..n) or the full directed `edges` list as `[source,
/// sink]` pairs, never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attachments: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    pub source: SpecSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpecSource {
    /// Desired positions, one `[x, y]` per agent.
    Coordinates { positions: Vec<[f64; 2]> },
    /// Desired distances in graph edge order and one orientation sign
    /// (`1` counterclockwise, `-1` clockwise) per triangle.
    Distances { distances: Vec<f64>, orientations: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GainPolicy {
    Auto { alpha: f64, margin: f64 },
    /// One entry per agent 2..n.
    Explicit { alpha: Vec<f64>, beta: Vec<f64> },
    /// The same `beta / alpha` for every ordinary follower.
    Ratio { alpha: f64, ratio: f64 },
}

impl Default for GainPolicy {
    fn default() -> Self {
        GainPolicy::Auto {
            alpha: DEFAULT_ALPHA,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    Explicit {
        positions: Vec<[f64; 2]>,
    },
    Random {
        #[serde(rename = "box")]
        bbox: SampleBox,
        seed: u64,
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub h: f64,
    pub t_final: f64,
    pub eps: f64,
    #[serde(default = "default_sustain")]
    pub sustain: usize,
}

fn default_sustain() -> usize {
    DEFAULT_SUSTAIN
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            t_final: DEFAULT_HORIZON,
            eps: DEFAULT_EPS,
            sustain: DEFAULT_SUSTAIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub decimation: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            decimation: DEFAULT_DECIMATION,
        }
    }
}

/// Optional grid of uniform gain ratios for `sweep`; each ratio replaces
/// the gain policy for one batch of seeded runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub ratios: Vec<f64>,
    #[serde(default = "default_sweep_alpha")]
    pub alpha: f64,
}

fn default_sweep_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn to_points(raw: &[[f64; 2]]) -> Vec<Point> {
    raw.iter().map(|&[x, y]| Point::new(x, y)).collect()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Schema rules that do not depend on formation geometry.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(bad(format!(
                "unsupported version {}, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        let f = &self.formation;
        if f.n < 2 {
            return Err(bad(format!("n must be at least 2, got {}", f.n)));
        }
        match (&f.attachments, &f.edges) {
            (Some(_), Some(_)) => return Err(bad("give either attachments or edges, not both")),
            (None, None) => return Err(bad("formation needs attachments or edges")),
            _ => {}
        }
        match &f.source {
            SpecSource::Coordinates { positions } if positions.len() != f.n => {
                return Err(bad(format!("{} desired positions for n = {}", positions.len(), f.n)));
            }
            SpecSource::Distances { orientations, .. } => {
                if orientations.iter().any(|&o| o != 1 && o != -1) {
                    return Err(bad("orientations must be 1 or -1"));
                }
            }
            _ => {}
        }
        match &self.gains {
            GainPolicy::Auto { alpha, margin } => {
                positive("gains.alpha", *alpha)?;
                if !(margin.is_finite() && *margin > 0.0) {
                    return Err(bad(format!("gains.margin must be positive, got {margin}")));
                }
            }
            GainPolicy::Explicit { alpha, beta } => {
                if alpha.len() != f.n - 1 || beta.len() != f.n - 1 {
                    return Err(bad(format!(
                        "explicit gains need {} alpha and beta entries (agents 2..n)",
                        f.n - 1
                    )));
                }
            }
            GainPolicy::Ratio { alpha, ratio } => {
                positive("gains.alpha", *alpha)?;
                if !(ratio.is_finite() && *ratio >= 0.0) {
                    return Err(bad(format!("gains.ratio must be non-negative, got {ratio}")));
                }
            }
        }
        match &self.initial {
            InitialConfig::Explicit { positions } => {
                if positions.len() != f.n {
                    return Err(bad(format!("{} initial positions for n = {}", positions.len(), f.n)));
                }
                if positions.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(bad("initial positions must be finite"));
                }
            }
            InitialConfig::Random { bbox, .. } => {
                bbox.validate().map_err(|e| bad(e.to_string()))?;
            }
        }
        let ig = &self.integrator;
        positive("integrator.h", ig.h)?;
        positive("integrator.t_final", ig.t_final)?;
        positive("integrator.eps", ig.eps)?;
        if ig.sustain == 0 {
            return Err(bad("integrator.sustain must be at least 1"));
        }
        if self.output.decimation == 0 {
            return Err(bad("output.decimation must be at least 1"));
        }
        if let Some(sw) = &self.sweep {
            positive("sweep.alpha", sw.alpha)?;
            if sw.ratios.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                return Err(bad("sweep.ratios must be non-negative and finite"));
            }
        }
        Ok(())
    }

    pub fn build_graph(&self) -> Result<DirectedFormationGraph> {
        let f = &self.formation;
        match (&f.attachments, &f.edges) {
            (Some(att), None) => {
                let pairs: Vec<(usize, usize)> = att.iter().map(|&[i, j]| (i, j)).collect();
                build_lff(f.n, &pairs)
            }
            (None, Some(edges)) => {
                let pairs: Vec<(usize, usize)> = edges.iter().map(|&[j, i]| (j, i)).collect();
                DirectedFormationGraph::from_labels(f.n, &pairs)
            }
            _ => Err(bad("formation needs exactly one of attachments or edges")),
        }
    }

    pub fn build_spec(&self) -> Result<FormationSpec> {
        let graph = self.build_graph()?;
        match &self.formation.source {
            SpecSource::Coordinates { positions } => FormationSpec::from_coordinates(graph, to_points(positions)),
            SpecSource::Distances {
                distances,
                orientations,
            } => {
                let orient = orientations
                    .iter()
                    .map(|&o| Orientation::from_sign(o))
                    .collect::<Result<Vec<_>>>()?;
                FormationSpec::from_distances(graph, distances.clone(), orient)
            }
        }
    }

    pub fn build_gains(&self, spec: &FormationSpec) -> Result<GainSchedule> {
        match &self.gains {
            GainPolicy::Auto { alpha, margin } => recommended_schedule(spec, *alpha, *margin),
            GainPolicy::Explicit { alpha, beta } => GainSchedule::explicit(spec.n(), alpha, beta),
            GainPolicy::Ratio { alpha, ratio } => GainSchedule::uniform_ratio(spec.n(), *alpha, *ratio),
        }
    }

    /// Seeds used by the random mode, in run order. `seed` overrides the
    /// configured base seed.
    pub fn seeds(&self, seed: Option<u64>) -> Vec<u64> {
        match &self.initial {
            InitialConfig::Explicit { .. } => Vec::new(),
            InitialConfig::Random { seed: base, count, .. } => {
                let base = seed.unwrap_or(*base);
                (0..*count as u64).map(|i| base.wrapping_add(i)).collect()
            }
        }
    }

    /// Initial state for one run: the explicit positions, or a draw from
    /// the box with the given seed.
    pub fn initial_state(&self, seed: u64) -> Result<AgentState> {
        match &self.initial {
            InitialConfig::Explicit { positions } => Ok(AgentState::new(to_points(positions))),
            InitialConfig::Random { bbox, .. } => sample_initial(self.formation.n, bbox, seed),
        }
    }

    pub fn sim_options(&self, override_collocated: bool, record: bool) -> SimOptions {
        SimOptions {
            h: self.integrator.h,
            t_final: self.integrator.t_final,
            eps: self.integrator.eps,
            sustain: self.integrator.sustain,
            record_every: record.then_some(self.output.decimation),
            override_collocated,
            retry_on_divergence: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EQUILATERAL: &str = r#"{
        "version": 1,
        "formation": {
            "n": 3,
            "attachments": [[1, 2]],
            "source": {"kind": "distances", "distances": [2, 2, 2], "orientations": [1]}
        },
        "gains": {"policy": "ratio", "alpha": 1.0, "ratio": 0.825},
        "initial": {"mode": "random", "box": {"x_min": -5, "x_max": 5, "y_min": -5, "y_max": 5}, "seed": 7, "count": 1}
    }"#;

    #[test]
    fn parses_minimal_config_with_defaults() {
        let cfg = ScenarioConfig::from_json_str(EQUILATERAL).unwrap();
        assert_eq!(cfg.integrator, IntegratorConfig::default());
        assert_eq!(cfg.output.decimation, 10);
        let spec = cfg.build_spec().unwrap();
        assert!((spec.areas()[0] - 3f64.sqrt()).abs() < 1e-12);
        let gains = cfg.build_gains(&spec).unwrap();
        assert_eq!(gains.ratio(2), Some(0.825));
        assert_eq!(cfg.seeds(None), vec![7]);
        assert_eq!(cfg.seeds(Some(40)), vec![40]);
    }

    #[test]
    fn rejects_schema_violations() {
        let cases = [
            EQUILATERAL.replace("\"version\": 1", "\"version\": 2"),
            EQUILATERAL.replace("\"attachments\": [[1, 2]]", "\"attachments\": [[1, 2]], \"edges\": [[2, 1]]"),
            EQUILATERAL.replace("\"attachments\": [[1, 2]],", ""),
            EQUILATERAL.replace("\"orientations\": [1]", "\"orientations\": [0]"),
            EQUILATERAL.replace("\"x_max\": 5", "\"x_max\": -6"),
            EQUILATERAL.replace(
                "\"initial\"",
                "\"integrator\": {\"h\": 0, \"t_final\": 1, \"eps\": 1e-6}, \"initial\"",
            ),
        ];
        for text in cases {
            assert!(matches!(ScenarioConfig::from_json_str(&text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = ScenarioConfig::from_json_str("{\"version\": 1,\n  \"formation\": }").unwrap_err();
        match err {
            Error::Parse(m) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            ScenarioConfig::from_json_str(&EQUILATERAL.replace("\"seed\"", "\"sed\"")),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn edges_and_coordinates() {
        let text = r#"{
            "version": 1,
            "formation": {
                "n": 3,
                "edges": [[2, 1], [3, 1], [3, 2]],
                "source": {"kind": "coordinates", "positions": [[0, 0], [3, 0], [0, 4]]}
            },
            "gains": {"policy": "explicit", "alpha": [1, 2], "beta": [0, 5]},
            "initial": {"mode": "explicit", "positions": [[0, 0], [1, 0], [0, 1]]}
        }"#;
        let cfg = ScenarioConfig::from_json_str(text).unwrap();
        let spec = cfg.build_spec().unwrap();
        assert_eq!(spec.distances(), &[3.0, 4.0, 5.0]);
        assert!((spec.areas()[0] - 6.0).abs() < 1e-12);
        let gains = cfg.build_gains(&spec).unwrap();
        assert_eq!(gains.beta(2), 5.0);
        assert!(cfg.seeds(None).is_empty());
        assert_eq!(cfg.initial_state(0).unwrap().positions[1], Point::new(1.0, 0.0));
    }

    fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
        let source = prop_oneof![
            prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 4)
                .prop_map(|positions| SpecSource::Coordinates { positions }),
            (prop::collection::vec(0.5f64..5.0, 5), prop::collection::vec(prop_oneof![Just(1i64), Just(-1i64)], 2))
                .prop_map(|(distances, orientations)| SpecSource::Distances { distances, orientations }),
        ];
        let gains = prop_oneof![
            (0.1f64..5.0, 0.01f64..1.0).prop_map(|(alpha, margin)| GainPolicy::Auto { alpha, margin }),
            (prop::collection::vec(0.1f64..5.0, 3), prop::collection::vec(0.0f64..5.0, 3))
                .prop_map(|(alpha, beta)| GainPolicy::Explicit { alpha, beta }),
            (0.1f64..5.0, 0.0f64..20.0).prop_map(|(alpha, ratio)| GainPolicy::Ratio { alpha, ratio }),
        ];
        let initial = prop_oneof![
            prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 4)
                .prop_map(|positions| InitialConfig::Explicit { positions }),
            (1.0f64..10.0, any::<u64>(), 0usize..200).prop_map(|(w, seed, count)| InitialConfig::Random {
                bbox: SampleBox::square(w),
                seed,
                count
            }),
        ];
        let sweep = prop::option::of(
            (prop::collection::vec(0.0f64..20.0, 0..5), 0.1f64..3.0).prop_map(|(ratios, alpha)| SweepConfig { ratios, alpha }),
        );
        (
            source,
            gains,
            initial,
            (1e-4f64..1e-2, 1.0f64..500.0, 1e-9f64..1e-3, 1usize..500),
            1usize..100,
            sweep,
            any::<bool>(),
        )
            .prop_map(|(source, gains, initial, (h, t_final, eps, sustain), decimation, sweep, use_edges)| {
                let (attachments, edges) = if use_edges {
                    (None, Some(vec![[2, 1], [3, 1], [3, 2], [4, 2], [4, 3]]))
                } else {
                    (Some(vec![[1, 2], [2, 3]]), None)
                };
                ScenarioConfig {
                    version: 1,
                    formation: FormationConfig {
                        n: 4,
                        attachments,
                        edges,
                        source,
                    },
                    gains,
                    initial,
                    integrator: IntegratorConfig { h, t_final, eps, sustain },
                    output: OutputConfig {
                        dir: PathBuf::from("runs/a"),
                        decimation,
                    },
                    sweep,
                }
            })
    }

    proptest! {
        #[test]
        fn json_round_trip(cfg in arb_config()) {
            let text = cfg.to_json_string();
            let back = ScenarioConfig::from_json_str(&text).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
