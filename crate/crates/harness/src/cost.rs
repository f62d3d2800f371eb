//! Operation-count reports for the six scalar operators and for whole
//! transforms.

use positlab_core::opgraph::{self, GraphReport, LatencyModel, Operator, TracedFormat, MODEL_NOTE};
use serde::Serialize;

use crate::config::RunConfig;
use crate::Result;

/// posit32 / float32 ratios for one operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub op: &'static str,
    pub total_nodes: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FftCost {
    pub n: usize,
    pub posit32: GraphReport,
    pub float32: GraphReport,
    pub total_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub fastmath: bool,
    pub note: &'static str,
    pub model: LatencyModel,
    pub operators: Vec<GraphReport>,
    pub ratios: Vec<Ratio>,
    pub fft: Vec<FftCost>,
}

impl CostReport {
    pub fn operator(&self, op: Operator) -> &GraphReport {
        self.operators.iter().find(|r| r.name == op.name()).expect("all operators reported")
    }

    pub fn ratio(&self, op: &str) -> &Ratio {
        self.ratios.iter().find(|r| r.op == op).expect("add, sub and mul reported")
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    a as f64 / b as f64
}

pub fn cost_report(cfg: &RunConfig) -> Result<CostReport> {
    let operators: Vec<GraphReport> = Operator::ALL.iter().map(|&op| opgraph::operator_report(op, cfg.fastmath)).collect();
    let by_name = |name: &str| operators.iter().find(|r| r.name == name).expect("traced");
    let ratios = [("add", "posit_add", "sf32_add"), ("sub", "posit_sub", "sf32_sub"), ("mul", "posit_mul", "sf32_mul")]
        .into_iter()
        .map(|(op, p, f)| {
            let (p, f) = (by_name(p), by_name(f));
            Ratio { op, total_nodes: ratio(p.total_nodes, f.total_nodes), height: ratio(p.height, f.height) }
        })
        .collect();
    let fft = cfg
        .sizes
        .iter()
        .map(|&lg| {
            let n = 1usize << lg;
            let posit32 = opgraph::fft_cost_report(n, TracedFormat::Posit32, cfg.fastmath)?;
            let float32 = opgraph::fft_cost_report(n, TracedFormat::Float32, cfg.fastmath)?;
            let total_ratio = ratio(posit32.total_nodes, float32.total_nodes);
            Ok(FftCost { n, posit32, float32, total_ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CostReport { fastmath: cfg.fastmath, note: MODEL_NOTE, model: LatencyModel::default(), operators, ratios, fft })
}
