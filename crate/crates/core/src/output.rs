//! Run configuration, CSV/SVG emission and the commands behind the CLI.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cocycle::{
    lyapunov_pair, sample_over_k, table1_within, DEFAULT_SEED, MEAN_TOLERANCE, TABLE1_RESOLUTION,
};
use crate::error::{invalid, Error, Result};
use crate::mahler::{
    bounds_check, figure1_data, mahler_quadrature, mahler_roots, perron_root_info, q_poly, r_poly,
    Figure1Row,
};
use crate::paircorr::{
    empirical_pair_correlations, renormalization_residual, spectral_report, ReportConfig,
    SpectralReport, WeightVector,
};
use crate::substitution::{classify, eigen_data, fixed_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(invalid(format!(
                "unknown format {other:?}; use csv, svg or text"
            ))),
        }
    }
}

/// Inclusive range of m values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MRange {
    pub from: u64,
    pub to: u64,
}

impl MRange {
    pub fn new(from: u64, to: u64) -> Result<Self> {
        if from == 0 || from > to {
            return Err(invalid(format!("bad m range {from}..{to}")));
        }
        Ok(Self { from, to })
    }

    pub fn single(m: u64) -> Result<Self> {
        Self::new(m, m)
    }
}

impl FromStr for MRange {
    type Err = Error;

    /// `a..b`, `a-b`, `a:b` or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| invalid(format!("bad m value {t:?}")))
        };
        for sep in ["..=", "..", "-", ":"] {
            if let Some((a, b)) = s.split_once(sep) {
                return Self::new(parse(a)?, parse(b)?);
            }
        }
        Self::single(parse(s)?)
    }
}

/// Parameters shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub range: MRange,
    /// Cocycle length.
    pub n: usize,
    /// Grid points per axis.
    pub resolution: usize,
    /// Patch radius R.
    pub radius: f64,
    pub seed: u64,
    /// Number of sampled k.
    pub samples: usize,
    pub tol: Option<f64>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            range: MRange { from: 1, to: 1 },
            n: 100_000,
            resolution: TABLE1_RESOLUTION,
            radius: 10_000.0,
            seed: DEFAULT_SEED,
            samples: 20,
            tol: None,
            format: OutputFormat::Text,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.resolution == 0 || self.samples == 0 {
            return Err(invalid("n, resolution and samples must be positive"));
        }
        if !(self.radius > 0.0) {
            return Err(invalid("radius must be positive"));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(invalid("tolerance must be positive"));
            }
        }
        Ok(())
    }
}

/// x with 6 significant digits, positional notation for 1e-4 ≤ |x| < 1e6.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').map_or(0, |i| i + 1)..]
        .parse()
        .unwrap_or(0);
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, x)
    } else {
        sci
    }
}

/// Rectangular table of formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// One cell of a [`CsvTable`] row.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_sig6(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(invalid(format!(
                "row has {} cells, header has {}",
                row.len(),
                self.header.len()
            )));
        }
        self.rows.push(row.iter().map(Cell::render).collect());
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Column `name` of row `i`.
    pub fn get(&self, i: usize, name: &str) -> Option<&str> {
        let col = self.header.iter().position(|h| h == name)?;
        self.rows.get(i).map(|r| r[col].as_str())
    }

    /// Comma-separated, header first, LF line endings.
    pub fn emit(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // writing to a Vec cannot fail
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = r
            .headers()
            .map_err(|e| invalid(format!("csv header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| invalid(format!("csv record: {e}")))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }

    /// Aligned columns for terminal output.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].chars().count())
                    .chain(std::iter::once(self.header[c].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell:>w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

pub fn cmd_classify(m: u64) -> Result<String> {
    let class = classify(m)?;
    let lambda = eigen_data(m)?.lambda_plus;
    Ok(if lambda.fract() == 0.0 {
        format!("{class}, λ={lambda}")
    } else {
        format!("{class}, λ≈{lambda:.6}")
    })
}

pub fn cmd_eigen(m: u64) -> Result<String> {
    let e = eigen_data(m)?;
    Ok(format!(
        "m = {m}\nλ₊ = {:.12}\nλ₋ = {:.12}\nlog λ = {:.12}\nfrequencies (ν₀, ν₁) = ({:.12}, {:.12})\n\
         lengths (ℓ₀, ℓ₁) = ({:.12}, {:.12})\ndensity = {:.12}",
        e.lambda_plus,
        e.lambda_minus,
        e.log_lambda(),
        e.freq[0],
        e.freq[1],
        e.lengths[0],
        e.lengths[1],
        e.density()
    ))
}

/// Central `n_letters` of the ρ²-fixed point, origin marked by `|`.
pub fn cmd_fixed_point(m: u64, n_letters: usize) -> Result<String> {
    Ok(fixed_point(m, n_letters)?.to_string())
}

/// `tol` defaults to the 1e-3 tie and refinement tolerance.
pub fn cmd_table1(range: MRange, resolution: usize, tol: Option<f64>) -> Result<CsvTable> {
    let mut t = CsvTable::new(["m", "log_lambda", "N", "mean"]);
    let tol = tol.unwrap_or(MEAN_TOLERANCE);
    for row in table1_within(range.from, range.to, resolution, tol)? {
        t.push(vec![
            row.m.into(),
            row.log_lambda.into(),
            row.n.into(),
            row.mean.into(),
        ])?;
    }
    Ok(t)
}

pub fn cmd_figure1(range: MRange) -> Result<(CsvTable, Vec<Figure1Row>)> {
    let rows = figure1_data(range.from, range.to)?;
    let mut t = CsvTable::new(["m", "log_lambda", "m_q"]);
    for r in &rows {
        t.push(vec![r.m.into(), r.log_lambda.into(), r.m_q.into()])?;
    }
    Ok((t, rows))
}

/// Scatter of log λ (dots) and m(q_m) (crosses) against m.
pub fn figure1_svg(rows: &[Figure1Row]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    let m_max = rows.iter().map(|r| r.m).max().unwrap_or(1) as f64;
    let m_min = rows.iter().map(|r| r.m).min().unwrap_or(1) as f64;
    let y_max = rows
        .iter()
        .flat_map(|r| [r.log_lambda, r.m_q])
        .fold(0.0, f64::max)
        .max(1e-9);
    let span = (m_max - m_min).max(1.0);
    let px = |m: f64| PAD + (m - m_min) / span * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - v / y_max * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD}V{b}H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    for tick in 0..=4 {
        let v = y_max * tick as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y:.1}" font-size="11" text-anchor="end">{v:.2}</text>"#,
            x = PAD - 6.0,
            y = py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="middle">m</text>"#,
        x = W / 2.0,
        y = H - 12.0
    );
    let _ = writeln!(s, r#"<g id="log-lambda" fill="steelblue">"#);
    for r in rows {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="3"/>"#,
            px(r.m as f64),
            py(r.log_lambda)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g id="mahler-q" stroke="firebrick" stroke-width="1.5">"#
    );
    for r in rows {
        let (x, y) = (px(r.m as f64), py(r.m_q));
        let _ = writeln!(
            s,
            r#"<path d="M{:.1} {:.1}L{:.1} {:.1}M{:.1} {:.1}L{:.1} {:.1}"/>"#,
            x - 3.5,
            y - 3.5,
            x + 3.5,
            y + 3.5,
            x - 3.5,
            y + 3.5,
            x + 3.5,
            y - 3.5
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" fill="steelblue">● log λ</text>"#,
        x = PAD + 10.0,
        y = PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="12" fill="firebrick">× m(q_m)</text>"#,
        x = PAD + 10.0,
        y = PAD + 16.0
    );
    s.push_str("</svg>\n");
    s
}

/// m(q_m), m(r_m) and the two upper-bound margins.
pub fn cmd_mahler(range: MRange) -> Result<CsvTable> {
    let mut t = CsvTable::new([
        "m",
        "m_q",
        "m_q_quadrature",
        "m_r",
        "margin_sqrt46",
        "margin_3_sqrt5",
    ]);
    for m in range.from..=range.to {
        let q = q_poly(m)?;
        let b = bounds_check(m)?;
        t.push(vec![
            m.into(),
            b.m_q.into(),
            mahler_quadrature(&q, 64)?.value.into(),
            mahler_roots(&r_poly(m)?)?.value.into(),
            b.margin_sqrt46.into(),
            b.margin_3_sqrt5.into(),
        ])?;
    }
    Ok(t)
}

/// The minimal polynomial of e^{m(q_m)} for m ∈ {3, 4, 5}, else `None`.
pub fn mahler_root_note(m: u64) -> Option<String> {
    let info = perron_root_info(m).ok()?;
    Some(format!(
        "m = {m}: e^(m(q)) = {:.12} is a {} number, root of {} (next largest modulus {:.6})",
        info.xi, info.class, info.poly, info.second_modulus
    ))
}

/// Per-k estimates plus the summary over the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovRun {
    pub table: CsvTable,
    pub mean_chi_b: f64,
    pub min_chi_min: f64,
    pub samples: usize,
}

impl LyapunovRun {
    pub fn summary(&self) -> String {
        format!(
            "{} samples: mean χ^B = {}, smallest χ_min = {}",
            self.samples,
            format_sig6(self.mean_chi_b),
            format_sig6(self.min_chi_min)
        )
    }
}

pub fn cmd_lyapunov(range: MRange, n: usize, samples: usize, seed: u64) -> Result<LyapunovRun> {
    let mut table = CsvTable::new(["m", "k", "chi_b", "chi_min", "chi_max", "chi_min_inverse"]);
    let mut sum = 0.0;
    let mut count = 0;
    let mut min_chi_min = f64::INFINITY;
    for m in range.from..=range.to {
        let mut est = sample_over_k(seed, samples, |k| lyapunov_pair(m, k, n))?;
        est.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (k, e) in est {
            sum += e.chi_b;
            count += 1;
            min_chi_min = min_chi_min.min(e.chi_min);
            table.push(vec![
                m.into(),
                k.into(),
                e.chi_b.into(),
                e.chi_min.into(),
                e.chi_max.into(),
                e.chi_min_inverse.unwrap_or(f64::NAN).into(),
            ])?;
        }
    }
    Ok(LyapunovRun {
        table,
        mean_chi_b: sum / count as f64,
        min_chi_min,
        samples: count,
    })
}

/// Coefficient table plus the renormalisation residual at |z| ≤ 100.
#[derive(Debug, Clone, PartialEq)]
pub struct PaircorrRun {
    pub table: CsvTable,
    pub residual: f64,
    pub interior_radius: f64,
    pub card: usize,
}

impl PaircorrRun {
    pub fn summary(&self) -> String {
        format!(
            "card(Λ_R) = {}; renormalisation residual over |z| ≤ {} is {}",
            self.card,
            self.interior_radius,
            format_sig6(self.residual)
        )
    }
}

pub const PAIRCORR_INTERIOR: f64 = 100.0;

pub fn cmd_paircorr(m: u64, radius: f64) -> Result<PaircorrRun> {
    let table = empirical_pair_correlations(m, radius)?;
    let lambda = eigen_data(m)?.lambda_plus;
    let interior = PAIRCORR_INTERIOR
        .min(table.max_displacement)
        .min(radius / lambda - lambda - m as f64);
    let residual = renormalization_residual(&table, m, interior)?;
    let ring = *table.ring();
    let mut out = CsvTable::new(["i", "j", "z_int", "z_lambda", "z", "nu"]);
    for (key, v) in table.entries() {
        let z = ring.normalize(key.z);
        out.push(vec![
            u64::from(key.i).into(),
            u64::from(key.j).into(),
            z.a.into(),
            z.b.into(),
            ring.embed(z).into(),
            v.into(),
        ])?;
    }
    Ok(PaircorrRun {
        table: out,
        residual,
        interior_radius: interior,
        card: table.card,
    })
}

pub fn cmd_report(
    m: u64,
    u0: Complex64,
    u1: Complex64,
    config: &ReportConfig,
) -> Result<SpectralReport> {
    spectral_report(m, WeightVector::new(u0, u1), config)
}
