//! Parameter sets and time grids behind each reproducible figure.

use std::fmt;

use aptsim_core::model::AptParams;
use aptsim_core::propagator::QubitDrive;
use clap::ValueEnum;

use crate::format::param_label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum FigureId {
    /// Identical qubits in the unbroken regime, a = 1.2 and 1.8.
    #[value(name = "2a")]
    Fig2a,
    /// Identical qubits close to the exceptional point, a = 1.01.
    #[value(name = "2b")]
    Fig2b,
    /// Different unbroken qubits, (1.2, 1.3) and (1.5, 1.6).
    #[value(name = "3a")]
    Fig3a,
    /// Different qubits close to the exceptional point, (1.01, 1.03).
    #[value(name = "3b")]
    Fig3b,
    /// Broken first qubit (a₁ = 0.8), a₂ swept over [0.5, 2.5].
    #[value(name = "4a")]
    Fig4a,
    /// Broken first qubit (a₁ = 0.8), a₂ ∈ {0.8, 1, 2}.
    #[value(name = "4b")]
    Fig4b,
    /// First qubit at the exceptional point (a₁ = 1), a₂ swept over [0.5, 2.5].
    #[value(name = "4c")]
    Fig4c,
    /// First qubit at the exceptional point (a₁ = 1), a₂ ∈ {0.8, 1, 2}.
    #[value(name = "4d")]
    Fig4d,
    /// PT and APT pairs with matched concurrence periods.
    #[value(name = "A4")]
    A4,
    /// Only the first qubit evolves.
    #[value(name = "A5")]
    A5,
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

/// One curve: the drive on each qubit, both starting from the Bell state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Curve {
    pub qubit1: AptParams,
    pub qubit2: QubitDrive,
}

impl Curve {
    pub fn new(qubit1: AptParams, qubit2: impl Into<QubitDrive>) -> Self {
        Self {
            qubit1,
            qubit2: qubit2.into(),
        }
    }

    /// `fig<id>_<a1>_<a2>`, with `id` standing in for an undriven qubit 2.
    pub fn file_stem(&self, id: &str) -> String {
        let a2 = match self.qubit2 {
            QubitDrive::Hamiltonian(p) => param_label(p.a()),
            QubitDrive::Identity => "id".to_string(),
        };
        format!("fig{id}_{}_{a2}", param_label(self.qubit1.a()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigurePreset {
    pub curves: Vec<Curve>,
    pub t_max: f64,
    pub dt: f64,
}

pub const FIGURE_DT: f64 = 0.01;

fn apt(a: f64) -> AptParams {
    AptParams::apt(a).expect("preset parameters are valid")
}

fn pt(a: f64) -> AptParams {
    AptParams::pt(a).expect("preset parameters are valid")
}

/// a₂ ∈ {0.5, 0.6, …, 2.5}, built from integers so the grid is exact to the
/// last digit.
pub fn surface_a2_grid() -> Vec<f64> {
    (5..=25).map(|k| k as f64 / 10.0).collect()
}

/// a₁ for the surface figures.
pub fn surface_a1(id: FigureId) -> Option<f64> {
    match id {
        FigureId::Fig4a => Some(0.8),
        FigureId::Fig4c => Some(1.0),
        _ => None,
    }
}

pub fn preset(id: FigureId) -> FigurePreset {
    let pair = |a1: f64, a2: f64| Curve::new(apt(a1), apt(a2));
    let (curves, t_max) = match id {
        FigureId::Fig2a => (vec![pair(1.2, 1.2), pair(1.8, 1.8)], 14.0),
        FigureId::Fig2b => (vec![pair(1.01, 1.01)], 70.0),
        FigureId::Fig3a => (vec![pair(1.2, 1.3), pair(1.5, 1.6)], 14.0),
        FigureId::Fig3b => (vec![pair(1.01, 1.03)], 70.0),
        FigureId::Fig4a | FigureId::Fig4c => {
            let a1 = surface_a1(id).unwrap();
            (surface_a2_grid().into_iter().map(|a2| pair(a1, a2)).collect(), 10.0)
        }
        FigureId::Fig4b => (vec![pair(0.8, 0.8), pair(0.8, 1.0), pair(0.8, 2.0)], 10.0),
        FigureId::Fig4d => (vec![pair(1.0, 0.8), pair(1.0, 1.0), pair(1.0, 2.0)], 10.0),
        FigureId::A4 => {
            // a² − 1 (APT) = 1 − a² (PT): 0.44 in the unbroken regime and
            // −0.36 in the broken one.
            let pt_unbroken = (1.0f64 - 0.44).sqrt();
            let pt_broken = (1.0f64 + 0.36).sqrt();
            (
                vec![
                    Curve::new(pt(pt_unbroken), pt(pt_unbroken)),
                    pair(1.2, 1.2),
                    Curve::new(pt(pt_broken), pt(pt_broken)),
                    pair(0.8, 0.8),
                ],
                14.0,
            )
        }
        FigureId::A5 => (
            vec![
                Curve::new(apt(1.2), QubitDrive::Identity),
                Curve::new(apt(0.8), QubitDrive::Identity),
            ],
            20.0,
        ),
    };
    FigurePreset {
        curves,
        t_max,
        dt: FIGURE_DT,
    }
}
