//! Flat INI-style run configuration.
//!
//! ```text
//! [run]
//! preset = exp1-desk
//!
//! [source]
//! background = 0
//! shape = disc 0.5 0 0.3 2
//! ```
//!
//! Sections: `run`, `domain`, `mu_a`, `mu_s`, `medium`, `source`, `forward`,
//! `recon`, `output`. Phantom sections take `background`, repeated `shape`
//! (overwrite inside the shape) and repeated `add` (add to what is below)
//! lines. The first shape line in a section replaces any preset shapes.
//! Lines starting with `#` or `;`, and anything after a whitespace-preceded
//! `#`, are comments.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use super::presets::Preset;
use crate::aanalytic::WeightRule;
use crate::error::{Error, Result};
use crate::forward::ForwardParams;
use crate::mesh::BoundaryCurve;
use crate::phantoms::{Blend, Layer, Medium, Phantom, ScatteringKernel};
use crate::rayxforms::RayQuadrature;
use crate::recon::{KernelIndex, ReconParams};

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    /// Generate with this target edge length.
    EdgeLength(f64),
    File(PathBuf),
}

impl MeshSource {
    fn parse_pair(h: Option<f64>, file: Option<PathBuf>) -> Option<Self> {
        file.map(MeshSource::File).or(h.map(MeshSource::EdgeLength))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardModel {
    /// Full transport with scattering.
    Transport,
    /// Attenuated line integrals only; scattering is ignored.
    Ballistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardConfig {
    pub mesh: MeshSource,
    pub model: ForwardModel,
    pub n_dir: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub k_points: usize,
    pub n_angles: usize,
    pub kernel_modes: usize,
    /// Midpoint samples per ray in the ballistic model.
    pub ray_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconConfig {
    pub mesh: MeshSource,
    pub m: usize,
    pub m_range: RangeInclusive<usize>,
    pub s: usize,
    pub line_points: usize,
    pub hilbert_points: usize,
    pub weight_rule: WeightRule,
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    pub boundary_margin: f64,
    pub kernel_index: KernelIndex,
    /// Score reconstructions against the configured source.
    pub pseudo_error: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub data: PathBuf,
    /// Per-triangle CSV; the summary goes to `<report>.summary`.
    pub report: PathBuf,
    pub sweep: PathBuf,
    pub sinogram: PathBuf,
    pub mesh: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub curve: BoundaryCurve,
    pub mu_a: Phantom,
    pub mu_s: Phantom,
    pub kernel: ScatteringKernel,
    pub source: Phantom,
    pub forward: ForwardConfig,
    pub recon: ReconConfig,
    pub output: OutputConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fwd = ForwardParams::default();
        let rec = ReconParams::default();
        Self {
            curve: BoundaryCurve::circle(1.0).expect("unit circle"),
            mu_a: Phantom::constant(0.0),
            mu_s: Phantom::constant(0.0),
            kernel: ScatteringKernel::HenyeyGreenstein { g: 0.0, truncation: None },
            source: Phantom::constant(0.0),
            forward: ForwardConfig {
                mesh: MeshSource::EdgeLength(0.02),
                model: ForwardModel::Transport,
                n_dir: fwd.n_dir,
                tol: fwd.tol,
                max_iters: fwd.max_iters,
                k_points: fwd.k_points,
                n_angles: fwd.n_angles,
                kernel_modes: fwd.kernel_modes,
                ray_points: 400,
            },
            recon: ReconConfig {
                mesh: MeshSource::EdgeLength(0.03),
                m: rec.m,
                m_range: 1..=10,
                s: rec.s,
                line_points: rec.quad.line_points,
                hilbert_points: rec.quad.hilbert_points,
                weight_rule: rec.weight_rule,
                cg_tol: rec.cg_tol,
                cg_max_iters: rec.cg_max_iters,
                boundary_margin: rec.boundary_margin,
                kernel_index: rec.kernel_index,
                pseudo_error: false,
            },
            output: OutputConfig {
                data: "boundary.csv".into(),
                report: "report.csv".into(),
                sweep: "sweep.csv".into(),
                sinogram: "sinogram.csv".into(),
                mesh: "mesh.txt".into(),
            },
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn medium(&self) -> Result<Medium> {
        Medium::new(self.curve.clone(), self.mu_a.clone(), self.mu_s.clone(), self.kernel.clone())
    }

    pub fn forward_params(&self) -> ForwardParams {
        let f = &self.forward;
        ForwardParams {
            n_dir: f.n_dir,
            tol: f.tol,
            max_iters: f.max_iters,
            k_points: f.k_points,
            n_angles: f.n_angles,
            kernel_modes: f.kernel_modes,
        }
    }

    /// Reconstruction parameters for order `m` (the configured order if `None`).
    pub fn recon_params(&self, m: Option<usize>) -> ReconParams {
        let r = &self.recon;
        ReconParams {
            m: m.unwrap_or(r.m),
            s: r.s,
            quad: RayQuadrature { line_points: r.line_points, hilbert_points: r.hilbert_points },
            weight_rule: r.weight_rule,
            cg_tol: r.cg_tol,
            cg_max_iters: r.cg_max_iters,
            boundary_margin: r.boundary_margin,
            kernel_index: r.kernel_index,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Error::Config { line: 0, msg };
        if self.forward.mesh == self.recon.mesh {
            return Err(cfg("forward and reconstruction meshes must differ to avoid an inverse crime".into()));
        }
        for mesh in [&self.forward.mesh, &self.recon.mesh] {
            if let MeshSource::EdgeLength(h) = mesh {
                if !(*h > 0.0) {
                    return Err(cfg(format!("mesh edge length must be positive, got {h}")));
                }
            }
        }
        let r = &self.recon;
        if r.m_range.is_empty() {
            return Err(cfg(format!("empty M range {}:{}", r.m_range.start(), r.m_range.end())));
        }
        let top = r.m.max(*r.m_range.end());
        if r.s < top + 3 {
            return Err(cfg(format!("S = {} must be at least M + 3 = {}", r.s, top + 3)));
        }
        let f = &self.forward;
        if f.n_dir < 4 || f.n_angles < 4 || f.k_points < 3 || !(f.tol > 0.0) || f.max_iters == 0 || f.ray_points == 0 {
            return Err(cfg("forward section has a non-positive size or tolerance".into()));
        }
        self.recon_params(None).validate().map_err(|e| cfg(e.to_string()))?;
        self.medium().map_err(|e| cfg(e.to_string()))?;
        Ok(())
    }

    pub fn from_preset(preset: Preset) -> Self {
        preset.config()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses and validates a configuration.
    pub fn parse(text: &str) -> Result<Self> {
        let entries = lex(text)?;
        let mut config = match entries.iter().find(|e| e.section == "run" && e.key == "preset") {
            Some(e) => Preset::parse(&e.value).map_err(|msg| Error::Config { line: e.line, msg })?.config(),
            None => Self::default(),
        };
        let mut builder = Builder::default();
        for e in &entries {
            builder.apply(&mut config, e).map_err(|msg| Error::Config { line: e.line, msg })?;
        }
        builder.finish(&mut config).map_err(|msg| Error::Config { line: 0, msg })?;
        config.validate()?;
        Ok(config)
    }

    /// Fully expanded form; parses back to an equal configuration.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[run]\nseed = {}\n", self.seed);
        let _ = writeln!(out, "[domain]\ncurve = {}\n", self.curve.descriptor());
        for (name, p) in [("mu_a", &self.mu_a), ("mu_s", &self.mu_s)] {
            let _ = writeln!(out, "[{name}]");
            write_phantom(&mut out, p);
        }
        let _ = writeln!(out, "[medium]");
        match &self.kernel {
            ScatteringKernel::HenyeyGreenstein { g, truncation } => {
                let _ = writeln!(out, "kernel = hg\ng = {g}");
                if let Some(t) = truncation {
                    let _ = writeln!(out, "truncation = {t}");
                }
            }
            ScatteringKernel::ModeTable(modes) => {
                let list: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
                let _ = writeln!(out, "kernel = table\nmodes = {}", list.join(" "));
            }
        }
        let _ = writeln!(out, "\n[source]");
        write_phantom(&mut out, &self.source);

        let f = &self.forward;
        let _ = writeln!(out, "[forward]");
        write_mesh(&mut out, &f.mesh);
        let model = match f.model {
            ForwardModel::Transport => "transport",
            ForwardModel::Ballistic => "ballistic",
        };
        let _ = writeln!(
            out,
            "model = {model}\nn_dir = {}\ntol = {}\nmax_iters = {}\nk = {}\nn = {}\nkernel_modes = {}\nray_points = {}\n",
            f.n_dir, f.tol, f.max_iters, f.k_points, f.n_angles, f.kernel_modes, f.ray_points
        );

        let r = &self.recon;
        let _ = writeln!(out, "[recon]");
        write_mesh(&mut out, &r.mesh);
        let rule = match r.weight_rule {
            WeightRule::Riemann => "riemann",
            WeightRule::Trapezoidal => "trapezoidal",
        };
        let index = match r.kernel_index {
            KernelIndex::Next => "next",
            KernelIndex::Same => "same",
        };
        let _ = writeln!(
            out,
            "m = {}\nm_range = {}:{}\ns = {}\nline_points = {}\nhilbert_points = {}\nweight_rule = {rule}\n\
             cg_tol = {}\ncg_max_iters = {}\nboundary_margin = {}\nkernel_index = {index}\npseudo_error = {}\n",
            r.m,
            r.m_range.start(),
            r.m_range.end(),
            r.s,
            r.line_points,
            r.hilbert_points,
            r.cg_tol,
            r.cg_max_iters,
            r.boundary_margin,
            r.pseudo_error
        );

        let o = &self.output;
        let _ = writeln!(
            out,
            "[output]\ndata = {}\nreport = {}\nsweep = {}\nsinogram = {}\nmesh = {}",
            o.data.display(),
            o.report.display(),
            o.sweep.display(),
            o.sinogram.display(),
            o.mesh.display()
        );
        out
    }
}

fn write_phantom(out: &mut String, p: &Phantom) {
    let _ = writeln!(out, "background = {}", p.background);
    for layer in &p.layers {
        let key = match layer.blend {
            Blend::Set => "shape",
            Blend::Add => "add",
        };
        let _ = writeln!(out, "{key} = {layer}");
    }
    out.push('\n');
}

fn write_mesh(out: &mut String, mesh: &MeshSource) {
    match mesh {
        MeshSource::EdgeLength(h) => {
            let _ = writeln!(out, "mesh_h = {h}");
        }
        MeshSource::File(p) => {
            let _ = writeln!(out, "mesh = {}", p.display());
        }
    }
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

const SECTIONS: [&str; 9] = ["run", "domain", "mu_a", "mu_s", "medium", "source", "forward", "recon", "output"];

/// A `#` starts a trailing comment only after whitespace, so paths may contain `#`.
fn strip_comment(raw: &str) -> &str {
    raw.char_indices()
        .find(|&(i, c)| c == '#' && i > 0 && raw[..i].ends_with(char::is_whitespace))
        .map_or(raw, |(i, _)| &raw[..i])
}

fn lex(text: &str) -> Result<Vec<Entry>> {
    let mut section: Option<String> = None;
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |msg: String| Error::Config { line, msg };
        let t = strip_comment(raw).trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with(';') {
            continue;
        }
        if let Some(name) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(bad(format!("unknown section [{name}]")));
            }
            section = Some(name.to_owned());
            continue;
        }
        let sec = section.clone().ok_or_else(|| bad("key outside of any section".into()))?;
        let (k, v) = t.split_once('=').ok_or_else(|| bad(format!("expected `key = value`, found `{t}`")))?;
        let key = k.trim().to_owned();
        let repeatable = key == "shape" || key == "add";
        if !repeatable && entries.iter().any(|e| e.section == sec && e.key == key) {
            return Err(bad(format!("duplicate key `{key}` in [{sec}]")));
        }
        entries.push(Entry { line, section: sec, key, value: v.trim().to_owned() });
    }
    Ok(entries)
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse::<T>().map_err(|_| format!("bad value `{v}`"))
}

#[derive(Default)]
struct Builder {
    /// Phantom sections whose preset shapes were already replaced.
    cleared: Vec<String>,
    kernel_kind: Option<String>,
    g: Option<f64>,
    truncation: Option<Option<usize>>,
    modes: Option<Vec<f64>>,
    fwd_h: Option<f64>,
    fwd_file: Option<PathBuf>,
    rec_h: Option<f64>,
    rec_file: Option<PathBuf>,
}

impl Builder {
    fn apply(&mut self, c: &mut RunConfig, e: &Entry) -> std::result::Result<(), String> {
        let v = e.value.as_str();
        let unknown = || Err(format!("unknown key `{}` in [{}]", e.key, e.section));
        match (e.section.as_str(), e.key.as_str()) {
            ("run", "preset") => {}
            ("run", "seed") => c.seed = num(v)?,
            ("domain", "curve") => c.curve = BoundaryCurve::parse_descriptor(v).map_err(|e| e.to_string())?,
            (sec @ ("mu_a" | "mu_s" | "source"), key) => {
                let phantom = match sec {
                    "mu_a" => &mut c.mu_a,
                    "mu_s" => &mut c.mu_s,
                    _ => &mut c.source,
                };
                match key {
                    "background" => phantom.background = num(v)?,
                    "shape" | "add" => {
                        if !self.cleared.iter().any(|s| s == sec) {
                            phantom.layers.clear();
                            self.cleared.push(sec.to_owned());
                        }
                        let blend = if key == "shape" { Blend::Set } else { Blend::Add };
                        phantom.layers.push(Layer::parse(v, blend).map_err(|e| e.to_string())?);
                    }
                    _ => return unknown(),
                }
            }
            ("medium", "kernel") => self.kernel_kind = Some(v.to_owned()),
            ("medium", "g") => self.g = Some(num(v)?),
            ("medium", "truncation") => self.truncation = Some(if v == "none" { None } else { Some(num(v)?) }),
            ("medium", "modes") => self.modes = Some(v.split_whitespace().map(num).collect::<std::result::Result<_, _>>()?),
            ("forward", key) => {
                let f = &mut c.forward;
                match key {
                    "mesh_h" => self.fwd_h = Some(num(v)?),
                    "mesh" => self.fwd_file = Some(v.into()),
                    "model" => {
                        f.model = match v {
                            "transport" => ForwardModel::Transport,
                            "ballistic" => ForwardModel::Ballistic,
                            _ => return Err(format!("unknown forward model `{v}`")),
                        }
                    }
                    "n_dir" => f.n_dir = num(v)?,
                    "tol" => f.tol = num(v)?,
                    "max_iters" => f.max_iters = num(v)?,
                    "k" => f.k_points = num(v)?,
                    "n" => f.n_angles = num(v)?,
                    "kernel_modes" => f.kernel_modes = num(v)?,
                    "ray_points" => f.ray_points = num(v)?,
                    _ => return unknown(),
                }
            }
            ("recon", key) => {
                let r = &mut c.recon;
                match key {
                    "mesh_h" => self.rec_h = Some(num(v)?),
                    "mesh" => self.rec_file = Some(v.into()),
                    "m" => r.m = num(v)?,
                    "m_range" => r.m_range = parse_range(v)?,
                    "s" => r.s = num(v)?,
                    "line_points" => r.line_points = num(v)?,
                    "hilbert_points" => r.hilbert_points = num(v)?,
                    "weight_rule" => {
                        r.weight_rule = match v {
                            "riemann" => WeightRule::Riemann,
                            "trapezoidal" => WeightRule::Trapezoidal,
                            _ => return Err(format!("unknown weight rule `{v}`")),
                        }
                    }
                    "cg_tol" => r.cg_tol = num(v)?,
                    "cg_max_iters" => r.cg_max_iters = num(v)?,
                    "boundary_margin" => r.boundary_margin = num(v)?,
                    "kernel_index" => {
                        r.kernel_index = match v {
                            "next" => KernelIndex::Next,
                            "same" => KernelIndex::Same,
                            _ => return Err(format!("unknown kernel index `{v}`")),
                        }
                    }
                    "pseudo_error" => r.pseudo_error = num(v)?,
                    _ => return unknown(),
                }
            }
            ("output", key) => {
                let o = &mut c.output;
                let slot = match key {
                    "data" => &mut o.data,
                    "report" => &mut o.report,
                    "sweep" => &mut o.sweep,
                    "sinogram" => &mut o.sinogram,
                    "mesh" => &mut o.mesh,
                    _ => return unknown(),
                };
                *slot = v.into();
            }
            _ => return unknown(),
        }
        Ok(())
    }

    fn finish(self, c: &mut RunConfig) -> std::result::Result<(), String> {
        if self.fwd_h.is_some() && self.fwd_file.is_some() {
            return Err("[forward] sets both `mesh` and `mesh_h`".into());
        }
        if self.rec_h.is_some() && self.rec_file.is_some() {
            return Err("[recon] sets both `mesh` and `mesh_h`".into());
        }
        if let Some(m) = MeshSource::parse_pair(self.fwd_h, self.fwd_file) {
            c.forward.mesh = m;
        }
        if let Some(m) = MeshSource::parse_pair(self.rec_h, self.rec_file) {
            c.recon.mesh = m;
        }
        let kind = self.kernel_kind.unwrap_or_else(|| match c.kernel {
            ScatteringKernel::HenyeyGreenstein { .. } => "hg".into(),
            ScatteringKernel::ModeTable(_) => "table".into(),
        });
        c.kernel = match kind.as_str() {
            "hg" => {
                if self.modes.is_some() {
                    return Err("`modes` applies only to `kernel = table`".into());
                }
                let (g0, t0) = match c.kernel {
                    ScatteringKernel::HenyeyGreenstein { g, truncation } => (g, truncation),
                    ScatteringKernel::ModeTable(_) => (0.0, None),
                };
                let g = self.g.unwrap_or(g0);
                let base = ScatteringKernel::henyey_greenstein(g).map_err(|e| e.to_string())?;
                match self.truncation.unwrap_or(t0) {
                    Some(t) => base.truncated(t),
                    None => base,
                }
            }
            "table" => {
                if self.g.is_some() || self.truncation.is_some() {
                    return Err("`g` and `truncation` apply only to `kernel = hg`".into());
                }
                let modes = match (self.modes, &c.kernel) {
                    (Some(m), _) => m,
                    (None, ScatteringKernel::ModeTable(m)) => m.clone(),
                    (None, _) => return Err("`kernel = table` needs `modes`".into()),
                };
                if modes.is_empty() || modes.iter().any(|m| !m.is_finite()) {
                    return Err("`modes` must be a nonempty list of finite numbers".into());
                }
                ScatteringKernel::ModeTable(modes)
            }
            other => return Err(format!("unknown kernel `{other}`")),
        };
        Ok(())
    }
}

/// Parses `a:b` into `a..=b`.
pub fn parse_range(v: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = v.split_once(':').ok_or_else(|| format!("expected `a:b`, found `{v}`"))?;
    let (a, b): (usize, usize) = (num(a.trim())?, num(b.trim())?);
    if a > b {
        return Err(format!("empty range `{v}`"));
    }
    Ok(a..=b)
}
