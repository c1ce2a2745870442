//! Analysis reports, their text and JSON renderings, and CSV trajectory
//! export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use exactalg::Rat;
use serde::{Deserialize, Serialize};

use crate::charts::{blow_up_all, blow_up_in_chart, ChartId};
use crate::dynamo::{Direction, Frame, Trajectory};
use crate::equilibria::{
    global_divisor_report, polar_report, Coord, DivisorSet, Equilibrium, ExactValue, FlowArc,
};
use crate::error::Result;
use crate::field::{Bindings, VectorField};
use crate::polar::{desingularize_polar, polar_pushforward, PolarField, PolarModel};
use crate::quasihom::Weights;
use crate::reference::{discrepancies, Discrepancy};

/// Blow-up used for an analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Directional,
    Sphere,
    HyperbolicX,
    HyperbolicY,
}

impl Model {
    pub fn parse(s: &str) -> Option<Model> {
        match s {
            "directional" => Some(Model::Directional),
            other => PolarModel::parse(other).map(Model::from),
        }
    }

    pub fn polar(self) -> Option<PolarModel> {
        match self {
            Model::Directional => None,
            Model::Sphere => Some(PolarModel::Sphere),
            Model::HyperbolicX => Some(PolarModel::HyperbolicX),
            Model::HyperbolicY => Some(PolarModel::HyperbolicY),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Directional => "directional",
            Model::Sphere => "sphere",
            Model::HyperbolicX => "hyperbolic-x",
            Model::HyperbolicY => "hyperbolic-y",
        }
    }
}

impl From<PolarModel> for Model {
    fn from(m: PolarModel) -> Model {
        match m {
            PolarModel::Sphere => Model::Sphere,
            PolarModel::HyperbolicX => Model::HyperbolicX,
            PolarModel::HyperbolicY => Model::HyperbolicY,
        }
    }
}

/// Arc of the divisor between consecutive equilibria. `None` marks an
/// unbounded end on a hyperbola.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub from: Option<f64>,
    pub to: Option<f64>,
    /// Sign of the angular velocity on the arc.
    pub sign: i8,
}

impl From<&FlowArc> for Arc {
    fn from(a: &FlowArc) -> Arc {
        Arc {
            from: Some(a.from),
            to: Some(a.to),
            sign: a.sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub system: [String; 2],
    pub parameters: BTreeMap<String, ExactValue>,
    pub weights: Weights,
    pub model: Model,
    pub equilibria: Vec<Equilibrium>,
    pub arcs: Vec<Arc>,
    /// Frames whose whole divisor consists of equilibria.
    pub lines_of_equilibria: Vec<String>,
    pub disagreements: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
}

fn system_lines(f: &VectorField) -> [String; 2] {
    [
        format!("{}' = {}", f.x(), f.f1()),
        format!("{}' = {}", f.y(), f.f2()),
    ]
}

fn parameters(b: &Bindings) -> BTreeMap<String, ExactValue> {
    b.values()
        .iter()
        .map(|(k, v)| (k.clone(), ExactValue(v.clone())))
        .collect()
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Divisor arcs of a desingularized polar field.
fn polar_arcs(pf: &PolarField, bindings: &Bindings, eqs: &[Equilibrium]) -> Result<Vec<Arc>> {
    let num = crate::dynamo::PolarNumField::new(pf, bindings)?;
    let flow = |angle: f64| sign_of(crate::dynamo::PlanarField::eval(&num, [angle, 0.0])[0]);
    let angles: Vec<f64> = eqs.iter().map(|e| e.divisor_angle).collect();
    let mut arcs = Vec::new();
    if pf.model() == PolarModel::Sphere {
        let tau = std::f64::consts::TAU;
        if angles.is_empty() {
            return Ok(vec![Arc {
                from: Some(0.0),
                to: Some(tau),
                sign: flow(0.0),
            }]);
        }
        for (i, &from) in angles.iter().enumerate() {
            let mut to = angles[(i + 1) % angles.len()];
            if to <= from {
                to += tau;
            }
            arcs.push(Arc {
                from: Some(from),
                to: Some(to % tau),
                sign: flow(0.5 * (from + to)),
            });
        }
        return Ok(arcs);
    }
    let Some((&first, &last)) = angles.first().zip(angles.last()) else {
        return Ok(vec![Arc {
            from: None,
            to: None,
            sign: flow(0.0),
        }]);
    };
    arcs.push(Arc {
        from: None,
        to: Some(first),
        sign: flow(first - 1.0),
    });
    for w in angles.windows(2) {
        arcs.push(Arc {
            from: Some(w[0]),
            to: Some(w[1]),
            sign: flow(0.5 * (w[0] + w[1])),
        });
    }
    arcs.push(Arc {
        from: Some(last),
        to: None,
        sign: flow(last + 1.0),
    });
    Ok(arcs)
}

/// Global divisor analysis of `f` in the given blow-up.
pub fn analyze(f: &VectorField, w: &Weights, model: Model, bindings: &Bindings) -> Result<AnalysisReport> {
    let mut report = AnalysisReport {
        system: system_lines(f),
        parameters: parameters(bindings),
        weights: *w,
        model,
        equilibria: Vec::new(),
        arcs: Vec::new(),
        lines_of_equilibria: Vec::new(),
        disagreements: Vec::new(),
        discrepancies: discrepancies()?,
    };
    match model.polar() {
        None => {
            let g = global_divisor_report(f, w, bindings)?;
            report.arcs = g.arcs.iter().map(Arc::from).collect();
            report.lines_of_equilibria = g.degenerate_charts.iter().map(|c| c.to_string()).collect();
            report.equilibria = g.equilibria;
            report.disagreements = g.disagreements;
        }
        Some(pm) => {
            let pf = desingularize_polar(&polar_pushforward(f, pm)?)?;
            match polar_report(&pf, bindings)? {
                DivisorSet::LineOfEquilibria => report.lines_of_equilibria.push(pm.to_string()),
                DivisorSet::Isolated(v) => {
                    report.arcs = polar_arcs(&pf, bindings, &v)?;
                    report.equilibria = v;
                }
            }
        }
    }
    Ok(report)
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "system:     {}", self.system[0]);
        let _ = writeln!(o, "            {}", self.system[1]);
        if !self.parameters.is_empty() {
            let ps: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k} = {}", v.0)).collect();
            let _ = writeln!(o, "parameters: {}", ps.join(", "));
        }
        let _ = writeln!(o, "weights:    {}", self.weights);
        let _ = writeln!(o, "model:      {}", self.model.name());
        for l in &self.lines_of_equilibria {
            let _ = writeln!(o, "line of equilibria: the divisor in {l} consists of equilibria");
        }
        let _ = writeln!(o, "divisor equilibria: {}", self.equilibria.len());
        for (i, e) in self.equilibria.iter().enumerate() {
            let _ = writeln!(o, "  #{} {}", i + 1, equilibrium_line(e));
        }
        if !self.arcs.is_empty() {
            let _ = writeln!(o, "flow on the divisor:");
            for a in &self.arcs {
                let end = |v: Option<f64>, inf: &str| v.map(|x| format!("{x:.12}")).unwrap_or_else(|| inf.to_string());
                let dir = match a.sign {
                    1 => "increasing angle",
                    -1 => "decreasing angle",
                    _ => "at rest",
                };
                let _ = writeln!(o, "  ({}, {}): {dir}", end(a.from, "-inf"), end(a.to, "+inf"));
            }
        }
        for d in &self.disagreements {
            let _ = writeln!(o, "chart disagreement: {d}");
        }
        let _ = writeln!(o, "printed variants that differ from the derivation: {}", self.discrepancies.len());
        for d in &self.discrepancies {
            let _ = writeln!(o, "{d}");
        }
        o
    }
}

fn coord_text(c: &Coord) -> String {
    match c {
        Coord::Exact { value } => value.0.to_string(),
        Coord::Isolated { approx, .. } | Coord::Enclosed { approx, .. } => format!("{approx:.12}"),
    }
}

fn coord_names(frame: Frame) -> (String, String) {
    match frame {
        Frame::Chart { chart } => {
            let (r, u) = chart.default_names();
            (r.to_string(), u.to_string())
        }
        Frame::Polar { model } => (model.angle_name().to_string(), model.radial_name().to_string()),
        Frame::Original => ("x".into(), "y".into()),
    }
}

fn equilibrium_line(e: &Equilibrium) -> String {
    let (n0, n1) = coord_names(e.frame);
    let j = match &e.jacobian_exact {
        Some(j) => format!("[[{}, {}], [{}, {}]]", j[0][0].0, j[0][1].0, j[1][0].0, j[1][1].0),
        None => {
            let j = e.jacobian;
            format!("[[{:.12}, {:.12}], [{:.12}, {:.12}]]", j[0][0], j[0][1], j[1][0], j[1][1])
        }
    };
    let ev = match &e.eigenvalues_exact {
        Some([a, b]) => format!("{{{}, {}}}", a.0, b.0),
        None => {
            let fmt = |v: [f64; 2]| {
                if v[1] == 0.0 {
                    format!("{:.12}", v[0])
                } else {
                    format!("{:.12}{:+.12}i", v[0], v[1])
                }
            };
            format!("{{{}, {}}}", fmt(e.eigenvalues[0]), fmt(e.eigenvalues[1]))
        }
    };
    format!(
        "angle {:.12} [{}] ({n0}, {n1}) = ({}, {})  J = {j}  eigenvalues {ev}  {}",
        e.divisor_angle,
        e.frame,
        coord_text(&e.coords[0]),
        coord_text(&e.coords[1]),
        e.classification.label()
    )
}

/// One blown-up field in one frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlownUpField {
    pub frame: Frame,
    pub vars: [String; 2],
    pub raw: [String; 2],
    pub desingularized: [String; 2],
    /// Power of the radial variable divided out.
    pub divided: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub system: [String; 2],
    pub weights: Weights,
    pub model: Model,
    pub fields: Vec<BlownUpField>,
}

/// Raw and desingularized fields for the chosen model; `charts` restricts
/// the directional charts (all four when empty).
pub fn blowup(f: &VectorField, w: &Weights, model: Model, charts: &[ChartId]) -> Result<BlowupReport> {
    let fields = match model.polar() {
        None => {
            let cfs = if charts.is_empty() {
                blow_up_all(f, w)?
            } else {
                charts.iter().map(|&c| blow_up_in_chart(f, w, c)).collect::<Result<_>>()?
            };
            cfs.iter()
                .map(|cf| BlownUpField {
                    frame: Frame::Chart { chart: cf.chart() },
                    vars: [cf.radial_var().to_string(), cf.angular_var().to_string()],
                    raw: [cf.raw()[0].to_string(), cf.raw()[1].to_string()],
                    desingularized: [cf.desing()[0].to_string(), cf.desing()[1].to_string()],
                    divided: w.k,
                })
                .collect()
        }
        Some(pm) => {
            let raw = polar_pushforward(f, pm)?;
            let des = desingularize_polar(&raw)?;
            vec![BlownUpField {
                frame: Frame::Polar { model: pm },
                vars: [pm.angle_name().to_string(), pm.radial_name().to_string()],
                raw: raw.render(),
                desingularized: des.render(),
                divided: des.divided_power(),
            }]
        }
    };
    Ok(BlowupReport {
        system: system_lines(f),
        weights: *w,
        model,
        fields,
    })
}

impl BlowupReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "system:  {}", self.system[0]);
        let _ = writeln!(o, "         {}", self.system[1]);
        let _ = writeln!(o, "weights: {}", self.weights);
        let _ = writeln!(o, "model:   {}", self.model.name());
        for b in &self.fields {
            let _ = writeln!(o, "[{}] ({}, {})", b.frame, b.vars[0], b.vars[1]);
            let _ = writeln!(o, "  raw:");
            for (v, e) in b.vars.iter().zip(&b.raw) {
                let _ = writeln!(o, "    {v}' = {e}");
            }
            let _ = writeln!(o, "  desingularized (divided by {}^{}):", radial_of(b), b.divided);
            for (v, e) in b.vars.iter().zip(&b.desingularized) {
                let _ = writeln!(o, "    {v}' = {e}");
            }
        }
        o
    }
}

fn radial_of(b: &BlownUpField) -> &str {
    match b.frame {
        Frame::Polar { .. } => &b.vars[1],
        _ => &b.vars[0],
    }
}

pub const CSV_HEADER: &str = "frame,traj_id,t,u,v";

/// CSV with one point per line; backward orbits carry negative times.
pub fn trajectories_csv(trs: &[Trajectory]) -> String {
    let mut o = String::from(CSV_HEADER);
    o.push('\n');
    for (id, tr) in trs.iter().enumerate() {
        let s = match tr.direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        for (t, p) in &tr.points {
            let _ = writeln!(o, "{},{id},{:.16e},{:.16e},{:.16e}", tr.frame, s * t, p[0], p[1]);
        }
    }
    o
}

pub fn trajectories_json(trs: &[Trajectory]) -> String {
    serde_json::to_string_pretty(trs).expect("trajectories serialize") + "\n"
}

pub fn trajectories_text(trs: &[Trajectory]) -> String {
    let mut o = String::new();
    for (id, tr) in trs.iter().enumerate() {
        let end = tr.last();
        let _ = writeln!(
            o,
            "{id} {} {:?} from ({:.6}, {:.6}) to ({:.6}, {:.6}) after t = {:.6}, {} points, {:?}",
            tr.frame,
            tr.direction,
            tr.initial[0],
            tr.initial[1],
            end[0],
            end[1],
            tr.end_time(),
            tr.points.len(),
            tr.termination
        );
    }
    o
}

/// Bindings text such as `a = 1`, for messages.
pub fn describe_bindings(values: &BTreeMap<String, Rat>) -> String {
    values.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}
