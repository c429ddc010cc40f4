//! Named configurations for the two reference experiments.
//!
//! The full-scale presets carry the published sizes: a forward mesh of about
//! 5.5M triangles (disc) or 1.55M triangles (ellipse) with 360 directions, and
//! reconstruction meshes of about 7k and 6k triangles. The desk presets keep
//! every physical parameter and shrink only the forward discretization to
//! 30k–80k triangles with 180 directions.

use super::config::{ForwardModel, MeshSource, RunConfig};
use crate::phantoms::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Exp1,
    Exp2,
    Exp1Desk,
    Exp2Desk,
}

/// Edge lengths chosen for the ring-template mesh generator.
const EXP1_FORWARD_H: f64 = 0.00109;
const EXP1_DESK_FORWARD_H: f64 = 0.0144;
const EXP1_RECON_H: f64 = 0.0299;
const EXP2_FORWARD_H: f64 = 0.00189;
const EXP2_DESK_FORWARD_H: f64 = 0.0105;
const EXP2_RECON_H: f64 = 0.0291;

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Exp1, Preset::Exp2, Preset::Exp1Desk, Preset::Exp2Desk];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Exp1 => "exp1",
            Preset::Exp2 => "exp2",
            Preset::Exp1Desk => "exp1-desk",
            Preset::Exp2Desk => "exp2-desk",
        }
    }

    pub fn parse(name: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| format!("unknown preset `{name}` (expected exp1, exp2, exp1-desk or exp2-desk)"))
    }

    pub fn config(self) -> RunConfig {
        let mut c = RunConfig::default();
        let (medium, source) = match self {
            Preset::Exp1 | Preset::Exp1Desk => (presets::experiment1_medium(), presets::experiment1_source()),
            Preset::Exp2 | Preset::Exp2Desk => (presets::experiment2_medium(), presets::experiment2_source()),
        };
        c.curve = medium.domain;
        c.mu_a = medium.mu_a;
        c.mu_s = medium.mu_s;
        c.kernel = medium.kernel;
        c.source = source;

        let (forward_h, recon_h, n_dir, k, m) = match self {
            Preset::Exp1 => (EXP1_FORWARD_H, EXP1_RECON_H, 360, 1024, 6),
            Preset::Exp1Desk => (EXP1_DESK_FORWARD_H, EXP1_RECON_H, 180, 1024, 6),
            Preset::Exp2 => (EXP2_FORWARD_H, EXP2_RECON_H, 360, 3000, 8),
            Preset::Exp2Desk => (EXP2_DESK_FORWARD_H, EXP2_RECON_H, 180, 3000, 8),
        };
        c.forward.mesh = MeshSource::EdgeLength(forward_h);
        c.forward.model = ForwardModel::Transport;
        c.forward.n_dir = n_dir;
        c.forward.k_points = k;
        c.forward.n_angles = 360;
        c.recon.mesh = MeshSource::EdgeLength(recon_h);
        c.recon.m = m;
        c.recon.m_range = 1..=10;
        c.recon.s = 128;
        c.recon.line_points = 100;
        c.recon.hilbert_points = 100;
        c.recon.pseudo_error = true;
        c
    }
}
