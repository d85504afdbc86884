//! Per-subcommand experiment drivers. Every run writes canonical JSON
//! reports (and CSV tables where defined) into the configured output
//! directory and prints a one-line summary per result.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use cuspsum::coeffs::{
    self, build_cusp_form, coefficient_statistics, divisor_tables, CoeffTable,
};
use cuspsum::error::Error;
use cuspsum::exppairs::{
    apply_process_word, pointwise_bound_table, rational, large_values_bound, moment_bound_terms,
    ExponentPair,
};
use cuspsum::moments::{
    constant_c, constant_cf, exact_power_moment, large_value_count, max_short_mean_square,
    omega_scan, short_mean_square, MomentMode,
};
use cuspsum::quadruples::{enumerate_equal_sum_quadruples, min_gap_ratio, QuadPattern};
use cuspsum::sums::{build_prefix_cache, PrefixCache, Twist};
use cuspsum::voronoi::{full_voronoi_check, truncation_error_scan};

use crate::config::{FormChoice, RunConfig};
use crate::report::{export_report, Report, Value};

pub struct Runner {
    pub cfg: RunConfig,
    hash: String,
}

impl Runner {
    pub fn new(cfg: RunConfig) -> Self {
        let hash = cfg.config_hash();
        Runner { cfg, hash }
    }

    fn build_table(&self) -> Result<CoeffTable, Error> {
        match self.cfg.form {
            FormChoice::Standard(id) => build_cusp_form(id, self.cfg.n_max),
            FormChoice::UnitImpulse => Ok(CoeffTable::unit_impulse(12, self.cfg.n_max)),
        }
    }

    fn report(&self, module: &str, op: &str) -> Report {
        Report::new(module, op, &self.hash, self.cfg.form.label())
    }

    fn out_path(&self, stem: &str) -> PathBuf {
        self.cfg
            .out_dir
            .join(format!("{stem}_{}.json", &self.hash[..8]))
    }

    fn write(&self, report: &Report, stem: &str) -> Result<(), Error> {
        let path = self.out_path(stem);
        export_report(report, &path)
            .map_err(|e| Error::InvalidParameter(format!("writing {}: {e}", path.display())))
    }

    fn caches(&self, table: &CoeffTable) -> Result<Vec<PrefixCache<f64>>, Error> {
        self.cfg
            .twists
            .iter()
            .map(|&(h, k)| build_prefix_cache(table, h, k))
            .collect()
    }

    /// Configured M grid, defaulting to a single point just under n_max / 2
    /// so that [M, 2M + max delta] stays inside the cached range.
    fn m_grid(&self) -> Vec<f64> {
        if self.cfg.m_grid.is_empty() {
            let slack = self
                .cfg
                .delta_grid
                .iter()
                .cloned()
                .fold(0.0f64, f64::max)
                .ceil() as usize
                + 2;
            vec![(self.cfg.n_max.saturating_sub(slack) / 2) as f64]
        } else {
            self.cfg.m_grid.clone()
        }
    }

    pub fn run_coeffs(&self, verify: bool) -> Result<(), Error> {
        let table = self.build_table()?;
        let dtables = divisor_tables(self.cfg.n_max);
        let stats = coefficient_statistics(&table, &dtables);

        let csv_path = self
            .cfg
            .out_dir
            .join(format!("coeffs_{}_{}.csv", self.cfg.form.label(), table.n_max()));
        if let Some(dir) = csv_path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        let file = File::create(&csv_path).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        coeffs::write_csv(&table, BufWriter::new(file))
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;

        let mut rep = self.report("coeffs", "coefficient_statistics");
        rep.param("n_max", table.n_max());
        rep.result("deligne_ok", Value::Bool(stats.deligne_ok));
        rep.result("rankin_selberg_full", stats.rankin_selberg_full);
        rep.result("rankin_selberg_half", stats.rankin_selberg_half);
        rep.result("rankin_selberg_gap", stats.rankin_selberg_gap);
        rep.result("shiu_ratio", stats.shiu_ratio);
        self.write(&rep, "coeffs_statistics")?;
        println!(
            "coeffs {}: n_max = {}, deligne_ok = {}, rankin_C_hat = {:.6}, shiu_ratio = {:.4}",
            self.cfg.form.label(),
            table.n_max(),
            stats.deligne_ok,
            stats.rankin_selberg_full,
            stats.shiu_ratio
        );
        if verify {
            if !stats.deligne_ok {
                return Err(Error::InvalidParameter(
                    "Deligne bound violated (exact check)".into(),
                ));
            }
            if matches!(self.cfg.form, FormChoice::Standard(coeffs::FormId::Delta)) {
                if let Some((m, n)) = coeffs::hecke_violation(&table) {
                    return Err(Error::InvalidParameter(format!(
                        "Hecke relation violated at ({m}, {n})"
                    )));
                }
                println!("verify: Hecke relations exact for all applicable n <= {}", table.n_max());
            }
            println!("verify: deligne_ok true");
        }
        Ok(())
    }

    pub fn run_voronoi(&self) -> Result<(), Error> {
        let table = self.build_table()?;
        let x_lo = (table.n_max() / 4) as f64;
        let x_hi = (table.n_max() / 2) as f64;
        let samples: Vec<f64> = (0..32)
            .map(|i| x_lo + (x_hi - x_lo) * (i as f64 + 0.37) / 32.0)
            .collect();
        let n_grid: Vec<usize> = [100usize, 1000, 10_000]
            .into_iter()
            .filter(|&n| (n as f64) <= x_lo)
            .collect();
        if n_grid.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "n_max = {} too small for the truncation scan",
                self.cfg.n_max
            )));
        }
        for &(h, k) in &self.cfg.twists {
            let twist = Twist::new(h, k)?;
            let scan = truncation_error_scan(&table, twist, &samples, &n_grid)?;
            let mut rep = self.report("voronoi", "truncation_error_scan");
            rep.param("twist", format!("{twist}").as_str());
            rep.param("x_lo", x_lo).param("x_hi", x_hi);
            rep.param(
                "n_grid",
                Value::List(n_grid.iter().map(|&n| Value::UInt(n as u64)).collect()),
            );
            rep.result(
                "errors",
                Value::List(
                    scan.errors
                        .iter()
                        .map(|&(n, e)| {
                            Value::List(vec![Value::UInt(n as u64), Value::Float(e)])
                        })
                        .collect(),
                ),
            );
            if let (Some(s), Some(i)) = (scan.slope, scan.intercept) {
                rep.result("slope", s);
                rep.result("intercept", i);
                rep.result("ms_slope", scan.ms_slope.unwrap());
            } else {
                rep.flags.push("slope undefined: single-point grid".into());
            }
            self.write(&rep, &format!("voronoi_scan_{h}_{k}"))?;
            println!(
                "voronoi {}: twist {twist}, slope = {}",
                self.cfg.form.label(),
                scan.slope.map_or("n/a".into(), |s| format!("{s:.4}")),
            );
        }
        Ok(())
    }

    pub fn run_moments(&self) -> Result<(), Error> {
        let table = self.build_table()?;
        let caches = self.caches(&table)?;
        let cc = constant_c(&table, table.n_max())?;
        let mut rep = self.report("moments", "constant_C");
        rep.param("cutoff", cc.cutoff);
        rep.result("value", cc.value).result("tail_estimate", cc.tail_estimate);
        self.write(&rep, "moments_constant_C")?;
        println!(
            "moments: C = {:.8} (tail estimate {:.2e})",
            cc.value, cc.tail_estimate
        );

        let cf_cutoff = 4000.min(table.n_max() as u64);
        let quadset = enumerate_equal_sum_quadruples(cf_cutoff)?;
        for cache in &caches {
            let twist = cache.twist();
            let cf = constant_cf(&table, twist, &quadset)?;
            let mut rep = self.report("moments", "constant_CF");
            rep.param("twist", format!("{twist}").as_str());
            rep.param("cutoff", cf.cutoff);
            rep.result("value", cf.value)
                .result("imag_residue", cf.imag_residue)
                .result("tail_estimate_rel", cf.tail_estimate_rel)
                .result("terms", cf.terms);
            self.write(&rep, &format!("moments_constant_CF_{}_{}", twist.h(), twist.k()))?;
            println!(
                "moments: C_F({twist}) = {:.8e} (imag residue {:.2e})",
                cf.value, cf.imag_residue
            );

            for &m in &self.m_grid() {
                let power =
                    exact_power_moment(cache, m, MomentMode::AbsPower, Some(self.cfg.a_exp))?;
                let mut rep = self.report("moments", "exact_power_moment");
                rep.param("twist", format!("{twist}").as_str());
                rep.param("m", m).param("a_exp", self.cfg.a_exp);
                rep.result("raw", power.raw)
                    .result("divisor", power.divisor)
                    .result("ratio", power.ratio);
                rep.flags = power.flags.clone();
                self.write(
                    &rep,
                    &format!("moments_power_{}_{}_m{}", twist.h(), twist.k(), m),
                )?;
                println!(
                    "moments: twist {twist}, M = {m}, A = {}: raw = {}, ratio = {:.6}",
                    self.cfg.a_exp, power.raw, power.ratio
                );

                let v_defaults = if self.cfg.v_grid.is_empty() {
                    vec![m.powf(0.25)]
                } else {
                    self.cfg.v_grid.clone()
                };
                let pair = apply_process_word(&self.cfg.word, &ExponentPair::trivial())?;
                for &v in &v_defaults {
                    let lv = large_value_count(cache, m, v, &pair, self.cfg.eps)?;
                    let mut rep = self.report("moments", "large_value_count");
                    rep.param("twist", format!("{twist}").as_str());
                    rep.param("m", m).param("v", v).param("eps", self.cfg.eps);
                    rep.param("word", self.cfg.word.as_str());
                    rep.result("r", lv.r)
                        .result("bound_value", lv.bound_value)
                        .result("margin", lv.margin);
                    self.write(
                        &rep,
                        &format!("moments_largeval_{}_{}_m{}_v{:.3}", twist.h(), twist.k(), m, v),
                    )?;
                    println!(
                        "moments: twist {twist}, M = {m}, V = {v:.3}: R = {} <= bound {:.3}",
                        lv.r, lv.bound_value
                    );
                }

                for &delta in &self.cfg.delta_grid {
                    if delta <= 0.0 {
                        continue;
                    }
                    let xi = self.cfg.xi.unwrap_or(m);
                    let short = short_mean_square(cache, m, xi, delta, self.cfg.eps)?;
                    let mut rep = self.report("moments", "short_mean_square");
                    rep.param("twist", format!("{twist}").as_str());
                    rep.param("m", m).param("xi", xi).param("delta", delta);
                    rep.result("raw", short.raw)
                        .result("divisor", short.divisor)
                        .result("ratio", short.ratio);
                    rep.flags = short.flags.clone();
                    self.write(
                        &rep,
                        &format!(
                            "moments_short_{}_{}_m{}_d{}",
                            twist.h(),
                            twist.k(),
                            m,
                            delta
                        ),
                    )?;
                    let maxed = max_short_mean_square(cache, m, delta, self.cfg.eps)?;
                    let mut rep = self.report("moments", "max_short_mean_square");
                    rep.param("twist", format!("{twist}").as_str());
                    rep.param("m", m).param("delta", delta);
                    rep.result("raw", maxed.raw)
                        .result("divisor", maxed.divisor)
                        .result("ratio", maxed.ratio);
                    rep.flags = maxed.flags.clone();
                    self.write(
                        &rep,
                        &format!(
                            "moments_maxshort_{}_{}_m{}_d{}",
                            twist.h(),
                            twist.k(),
                            m,
                            delta
                        ),
                    )?;
                    println!(
                        "moments: twist {twist}, M = {m}, Delta = {delta}: short ratio = {:.4}, max-short ratio = {:.4}{}",
                        short.ratio,
                        maxed.ratio,
                        if short.flags.is_empty() { "" } else { " [flagged]" }
                    );
                }
            }
        }
        Ok(())
    }

    pub fn run_quadruples(&self) -> Result<(), Error> {
        let cutoff = (self.cfg.n_max as u64).min(cuspsum::quadruples::ENUMERATION_CAP);
        let set = enumerate_equal_sum_quadruples(cutoff)?;
        let csv_path = self.cfg.out_dir.join(format!("quadruples_{cutoff}.csv"));
        if let Some(dir) = csv_path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        let file =
            File::create(&csv_path).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "a,b,c,d,gap").map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for q in &set.members {
            writeln!(w, "{},{},{},{},0", q[0], q[1], q[2], q[3])
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        drop(w);

        let mut rep = self.report("quadruples", "enumerate_equal_sum_quadruples");
        rep.param("cutoff", cutoff);
        rep.result("same_kernel_members", set.members.len());
        rep.result("ordered_count", Value::Str(set.ordered_count().to_string()));
        self.write(&rep, &format!("quadruples_enum_{cutoff}"))?;
        println!(
            "quadruples: cutoff {cutoff}: {} same-kernel members, {} ordered solutions",
            set.members.len(),
            set.ordered_count()
        );

        let scan_n = cutoff.min(100).max(2);
        for (pattern, label) in [(QuadPattern::TwoTwo, "two_two"), (QuadPattern::ThreeOne, "three_one")] {
            let r = min_gap_ratio(scan_n, pattern)?;
            let mut rep = self.report("quadruples", "min_gap_ratio");
            rep.param("n", scan_n).param("pattern", label);
            rep.result("min_gap", r.min_gap).result("min_ratio", r.min_ratio);
            rep.result(
                "min_ratio_at",
                Value::List(r.min_ratio_at.iter().map(|&x| Value::UInt(x)).collect()),
            );
            self.write(&rep, &format!("quadruples_mingap_{label}_{scan_n}"))?;
            println!(
                "quadruples: {label} N = {scan_n}: min gap = {:.6e}, min gap*c^2*sqrt(abc) = {:.4}",
                r.min_gap, r.min_ratio
            );
        }
        Ok(())
    }

    pub fn run_exppairs(&self) -> Result<(), Error> {
        let pair = apply_process_word(&self.cfg.word, &ExponentPair::trivial())?;
        println!("{pair}");
        let mut rep = self.report("exppairs", "apply_process_word");
        rep.param("word", self.cfg.word.as_str());
        rep.result("p", Value::Str(pair.p().to_string()));
        rep.result("q", Value::Str(pair.q().to_string()));

        if let (Some(&m), Some(&(_, k))) = (self.cfg.m_grid.first(), self.cfg.twists.first()) {
            if let Some(&v) = self.cfg.v_grid.first() {
                let bound = large_values_bound(&pair, k, m, v, self.cfg.eps)?;
                rep.result("large_values_bound", bound.value);
                rep.result(
                    "second_term_v_exponent",
                    Value::Str(bound.second.v_exp.clone().unwrap().to_string()),
                );
            }
            let (phi, psi) =
                moment_bound_terms(&pair, &rational(2, 3), &rational(1, 3), &rational_from(self.cfg.a_exp))?;
            rep.result("phi_k_exp", Value::Str(phi.k_exp.to_string()));
            rep.result("phi_m_exp", Value::Str(phi.m_exp.to_string()));
            rep.result("psi_k_exp", Value::Str(psi.k_exp.to_string()));
            rep.result("psi_m_exp", Value::Str(psi.m_exp.to_string()));
            if m.fract() == 0.0 && k as f64 <= m.sqrt() {
                let (val, regime) = pointwise_bound_table(k, m as u64, self.cfg.eps)?;
                rep.result("pointwise_bound", val);
                rep.result("pointwise_regime", regime);
            }
        }
        self.write(&rep, "exppairs_word")?;
        Ok(())
    }

    pub fn run_oscillation(&self) -> Result<(), Error> {
        let table = self.build_table()?;
        let caches = self.caches(&table)?;
        let window = (
            -std::f64::consts::FRAC_PI_2 - 0.1,
            std::f64::consts::PI + 0.1,
        );
        for cache in &caches {
            let twist = cache.twist();
            for &m in &self.m_grid() {
                let min_len = (m.sqrt() / m.ln().powi(2)).ceil() as u64;
                let scan = omega_scan(
                    cache,
                    m,
                    self.cfg.c_small,
                    self.cfg.c_big,
                    window,
                    min_len.max(1),
                )?;
                let mut rep = self.report("moments", "omega_scan");
                rep.param("twist", format!("{twist}").as_str());
                rep.param("m", m)
                    .param("c_small", self.cfg.c_small)
                    .param("c_big", self.cfg.c_big)
                    .param("arg_window_lo", window.0)
                    .param("arg_window_hi", window.1);
                rep.result("measure", scan.measure)
                    .result("proportion", scan.proportion)
                    .result("delta_len", scan.delta_len)
                    .result("amplitude_threshold", scan.amplitude_threshold)
                    .result("interval_count", scan.intervals.len())
                    .result("longest_interval", scan.longest_interval);
                self.write(
                    &rep,
                    &format!("oscillation_{}_{}_m{}", twist.h(), twist.k(), m),
                )?;
                println!(
                    "oscillation: twist {twist}, M = {m}: proportion = {:.4}, intervals >= {} long: {}, longest = {}",
                    scan.proportion,
                    min_len,
                    scan.intervals.len(),
                    scan.longest_interval
                );
            }
        }
        Ok(())
    }

    /// Voronoi full-formula smoke check over a short window; part of `all`.
    pub fn run_full_voronoi(&self) -> Result<(), Error> {
        let table = self.build_table()?;
        let n_terms = table.n_max().min(20_000);
        for &(h, k) in &self.cfg.twists {
            let twist = Twist::new(h, k)?;
            let r = full_voronoi_check(&table, twist, 10.5, 50.5, n_terms)?;
            let mut rep = self.report("voronoi", "full_voronoi_check");
            rep.param("twist", format!("{twist}").as_str());
            rep.param("a", 10.5).param("b", 50.5).param("n_terms", n_terms);
            rep.result("lhs_re", r.lhs.re).result("lhs_im", r.lhs.im);
            rep.result("rhs_re", r.rhs.re).result("rhs_im", r.rhs.im);
            rep.result("abs_gap", r.abs_gap).result("rel_gap", r.rel_gap);
            self.write(&rep, &format!("voronoi_full_{h}_{k}"))?;
            println!(
                "voronoi full formula: twist {twist}: lhs = {:.6}, rhs = {:.6}, rel gap = {:.4}",
                r.lhs.re, r.rhs.re, r.rel_gap
            );
        }
        Ok(())
    }

    pub fn run_all(&self, verify: bool) -> Result<(), Error> {
        self.run_coeffs(verify)?;
        self.run_exppairs()?;
        self.run_quadruples()?;
        self.run_voronoi()?;
        self.run_full_voronoi()?;
        self.run_moments()?;
        self.run_oscillation()?;
        Ok(())
    }
}

fn rational_from(x: f64) -> num_rational::BigRational {
    num_rational::BigRational::from_float(x).expect("finite exponent")
}
