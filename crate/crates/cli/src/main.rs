//! Command-line entry point: configuration-driven experiments over the
//! levyfield library. Outputs are deterministic for a fixed config and seed,
//! and every artifact carries the config hash.

mod config;

use clap::{Parser, Subcommand};
use config::{ExperimentConfig, KernelMethod, PairMode};
use levyfield::conditions;
use levyfield::error::Error;
use levyfield::fft::NdFft;
use levyfield::field::{
    bump, fubini_check, pair_generalized, pair_whitenoise, simulate_mild_with, spde_residual,
    FieldRealization,
};
use levyfield::grid::GridSpec;
use levyfield::kernel::{
    kernel_bm, kernel_carma1d, kernel_fft, kernel_matern3, kernel_regularized, BMKernelSpec,
    Carma1dStateSpace, KernelGrid,
};
use levyfield::levy::simulate_cells;
use levyfield::stats;
use levyfield::strip;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "levyfield", version, about = "CARMA random fields driven by Lévy noise")]
struct Cli {
    /// Experiment configuration file (TOML)
    #[arg(short, long, global = true, default_value = "experiment.toml")]
    config: PathBuf,
    /// Output directory (overrides config; env LEVYFIELD_OUT wins over both)
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the existence conditions for the configured symbol and noise
    Check,
    /// Synthesize the configured kernel and write it with a radial profile
    Kernel,
    /// Simulate cell noise and mild-solution fields
    Simulate,
    /// Compute pairings (white-noise, generalized, residual or Fubini)
    Pair,
    /// Characteristic-functional and moment verification
    Verify,
    /// Averaged periodogram and autocovariance against the model density
    Spectrum,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config(_) | Error::Io(_) => 2,
                Error::Argument(_) | Error::Precondition(_) => 3,
                Error::Numerical(_) | Error::Resource(_) => 4,
            };
            std::process::exit(code);
        }
    }
}

fn run(cli: &Cli) -> levyfield::Result<()> {
    let (cfg, hash) = ExperimentConfig::load(&cli.config)?;
    let out_dir = resolve_out_dir(cli, &cfg);
    std::fs::create_dir_all(&out_dir)?;
    let mut fft = NdFft::new();
    match cli.command {
        Command::Check => cmd_check(&cfg, hash, &out_dir, &mut fft),
        Command::Kernel => cmd_kernel(&cfg, hash, &out_dir, &mut fft),
        Command::Simulate => cmd_simulate(&cfg, hash, &out_dir, &mut fft),
        Command::Pair => cmd_pair(&cfg, hash, &out_dir, &mut fft),
        Command::Verify => cmd_verify(&cfg, hash, &out_dir, &mut fft),
        Command::Spectrum => cmd_spectrum(&cfg, hash, &out_dir, &mut fft),
    }
}

fn resolve_out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    if let Ok(env) = std::env::var("LEVYFIELD_OUT") {
        return PathBuf::from(env);
    }
    if let Some(o) = &cli.out {
        return o.clone();
    }
    PathBuf::from(&cfg.output.dir)
}

fn meta_line(hash: u64, seed: u64) -> String {
    format!(
        "# config_hash={hash:016x} version={} seed={seed}\n",
        env!("CARGO_PKG_VERSION")
    )
}

fn build_kernel(
    cfg: &ExperimentConfig,
    spec: &GridSpec<f64>,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<KernelGrid<f64>> {
    let opts = &cfg.options;
    match opts.kernel_method {
        KernelMethod::Fft => kernel_fft(&cfg.poly_p()?, &cfg.poly_q()?, spec, fft),
        KernelMethod::Regularized => {
            let p = cfg.poly_p()?;
            let q = cfg.poly_q()?;
            let alpha = match opts.alpha {
                Some(a) => a,
                None => strip::select_alpha(&p, &q, opts.epsilon)?,
            };
            kernel_regularized(&p, &q, alpha, spec, fft)
        }
        KernelMethod::Carma1d => {
            let ss = Carma1dStateSpace::new(opts.carma_a.clone(), opts.carma_b.clone())?;
            kernel_carma1d(&ss, spec)
        }
        KernelMethod::Bm => {
            let bm =
                BMKernelSpec::new(opts.bm_lambdas.clone(), opts.bm_kappas.clone(), spec.d())?;
            kernel_bm(&bm, spec)
        }
        KernelMethod::Matern3 => kernel_matern3(opts.matern_lambda, spec),
        KernelMethod::Delta => Ok(KernelGrid::delta(spec.clone())),
    }
}

fn cmd_check(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let p = cfg.poly_p()?;
    let q = cfg.poly_q()?;
    let opts = &cfg.options;
    let mut report = conditions::ConditionReport::<f64>::default();

    let strip_rep =
        strip::check_strip(&p, &q, opts.epsilon, opts.box_halfwidth, opts.strip_resolution)?;
    let strip_verdict = match strip_rep.verdict {
        strip::StripVerdict::HoldsOnBox => conditions::Verdict::Holds,
        strip::StripVerdict::Fails => conditions::Verdict::Fails,
        strip::StripVerdict::Inconclusive => conditions::Verdict::Inconclusive,
    };
    report.push(conditions::ConditionEntry {
        name: "strip_holomorphy".into(),
        verdict: strip_verdict,
        values: vec![
            ("min_abs_p".into(), Some(strip_rep.min_abs_p)),
            ("epsilon".into(), Some(strip_rep.epsilon_tested)),
        ],
        tolerance: strip::zero_tolerance(&p),
        tail_provenance: "sampled box + leading-form/outer-shell semi-decision".into(),
    });

    report.push(conditions::check_mild(&p, &q, opts.epsilon, &cfg.triplet)?);

    if strip_rep.verdict == strip::StripVerdict::HoldsOnBox {
        match opts.alpha.map(Ok).unwrap_or_else(|| strip::select_alpha(&p, &q, opts.epsilon)) {
            Ok(alpha) => report.push(conditions::ConditionEntry {
                name: "alpha_selection".into(),
                verdict: conditions::Verdict::Holds,
                values: vec![("alpha".into(), Some(alpha as f64))],
                tolerance: 0.0,
                tail_provenance: "smallest alpha with convergent strip L2 norm".into(),
            }),
            Err(e) => report.push(conditions::ConditionEntry {
                name: "alpha_selection".into(),
                verdict: conditions::Verdict::Inconclusive,
                values: vec![],
                tolerance: 0.0,
                tail_provenance: format!("{e}"),
            }),
        }
    }

    if p.is_homogeneous() && !p.is_zero() {
        match conditions::check_elliptic(&p, &cfg.triplet, 0.01) {
            Ok(entry) => report.push(entry),
            Err(e) => report.push(conditions::ConditionEntry {
                name: "elliptic".into(),
                verdict: conditions::Verdict::NotApplicable,
                values: vec![],
                tolerance: 0.01,
                tail_provenance: format!("{e}"),
            }),
        }
    }

    // kernel-level conditions when a kernel is constructible
    let spec = cfg.grid_spec()?;
    match build_kernel(cfg, &spec, fft) {
        Ok(kernel) => {
            let radii = opts.radii.clone();
            report.push(conditions::check_sufficient_t1(&kernel, &cfg.triplet, &radii, fft)?);
            report.push(conditions::check_sufficient_t38(
                &kernel,
                &cfg.triplet,
                radii[0],
                fft,
            )?);
            report.push(conditions::check_necessary(&kernel, &cfg.triplet, radii[0], fft)?);
        }
        Err(e) => report.push(conditions::ConditionEntry {
            name: "kernel_conditions".into(),
            verdict: conditions::Verdict::Inconclusive,
            values: vec![],
            tolerance: 0.0,
            tail_provenance: format!("kernel synthesis failed: {e}"),
        }),
    }

    let rendered = report.render();
    print!("{rendered}");
    let mut f = File::create(out.join("check_report.txt"))?;
    f.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    f.write_all(rendered.as_bytes())?;
    let mut kv = File::create(out.join("check_report.kv"))?;
    kv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    for e in &report.entries {
        let verdict = match e.verdict {
            conditions::Verdict::Holds => "holds",
            conditions::Verdict::Fails => "fails",
            conditions::Verdict::NotApplicable => "not_applicable",
            conditions::Verdict::Inconclusive => "inconclusive",
        };
        writeln!(kv, "{}.verdict={verdict}", e.name)?;
        for (k, v) in &e.values {
            match v {
                Some(x) => writeln!(kv, "{}.{k}={x:e}", e.name)?,
                None => writeln!(kv, "{}.{k}=inf", e.name)?,
            }
        }
    }
    Ok(())
}

fn cmd_kernel(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let spec = cfg.grid_spec()?;
    let kernel = build_kernel(cfg, &spec, fft)?;
    let mut f = File::create(out.join("kernel.bin"))?;
    levyfield::io::write_kernel(&mut f, &kernel, hash)?;
    // radial profile along the positive first axis
    let mut csv = File::create(out.join("kernel_radial.csv"))?;
    csv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    writeln!(csv, "r,G")?;
    let mut idx = vec![0usize; spec.d()];
    for j in 0..spec.dims[0].div_ceil(2) {
        idx[0] = j;
        let flat = spec.flat_index(&idx);
        writeln!(csv, "{},{:e}", spec.wrap_coord(0, j), kernel.values[flat])?;
    }
    println!(
        "kernel written: {} cells, max |G| = {:.6e}, truncation estimate {:?}",
        spec.len(),
        kernel.max_abs(),
        kernel.truncation_estimate
    );
    Ok(())
}

fn cmd_simulate(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let spec = cfg.grid_spec()?;
    let kernel = build_kernel(cfg, &spec, fft)?;
    for stream in 0..cfg.sim.streams {
        let noise = simulate_cells(&cfg.triplet, &spec, cfg.sim.delta, cfg.sim.seed, stream)?;
        let mut nf = File::create(out.join(format!("noise_{stream}.bin")))?;
        levyfield::io::write_noise(&mut nf, &noise, hash)?;
        let field = simulate_mild_with(&kernel, &noise, fft, cfg.options.wrap_tol)?;
        let mut ff = File::create(out.join(format!("field_{stream}.bin")))?;
        levyfield::io::write_field(&mut ff, &field, hash)?;
    }
    println!("wrote {} noise/field pairs to {}", cfg.sim.streams, out.display());
    Ok(())
}

fn cmd_pair(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let spec = cfg.grid_spec()?;
    let opts = &cfg.options;
    let phi = bump(&cfg.bump_center(), opts.bump_radius, opts.bump_amplitude, &spec)?;
    let p = cfg.poly_p()?;
    let q = cfg.poly_q()?;
    let log_path = out.join("pairings.csv");
    let new_file = !log_path.exists();
    let mut log = std::fs::OpenOptions::new().create(true).append(true).open(&log_path)?;
    if new_file {
        log.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
        writeln!(log, "mode,seed,stream,value,extra")?;
    }
    for stream in 0..cfg.sim.streams {
        let noise = simulate_cells(&cfg.triplet, &spec, cfg.sim.delta, cfg.sim.seed, stream)?;
        match opts.pair_mode {
            PairMode::Whitenoise => {
                let v = pair_whitenoise(&noise, &phi.data)?;
                writeln!(log, "whitenoise,{},{stream},{v:e},", cfg.sim.seed)?;
            }
            PairMode::Generalized => {
                let alpha = match opts.alpha {
                    Some(a) => a,
                    None => strip::select_alpha(&p, &q, opts.epsilon)?,
                };
                let kpsi = kernel_regularized(&p, &q, alpha, &spec, fft)?;
                let v = pair_generalized(&kpsi, alpha, &noise, &phi.data, fft)?;
                writeln!(log, "generalized,{},{stream},{v:e},alpha={alpha}", cfg.sim.seed)?;
            }
            PairMode::Residual => {
                let alpha = match opts.alpha {
                    Some(a) => a,
                    None => strip::select_alpha(&p, &q, opts.epsilon)?,
                };
                let kpsi = kernel_regularized(&p, &q, alpha, &spec, fft)?;
                let r = spde_residual(&p, &q, &kpsi, alpha, &noise, &phi, fft)?;
                writeln!(
                    log,
                    "residual,{},{stream},{:e},relative={:e}",
                    cfg.sim.seed,
                    r.residual,
                    r.relative()
                )?;
            }
            PairMode::Fubini => {
                let kernel = build_kernel(cfg, &spec, fft)?;
                let f = fubini_check(&kernel, &noise, &phi, fft)?;
                writeln!(
                    log,
                    "fubini,{},{stream},{:e},relative={:e}",
                    cfg.sim.seed,
                    f.diff,
                    f.relative()
                )?;
            }
        }
    }
    println!("appended {} pairings to {}", cfg.sim.streams, log_path.display());
    Ok(())
}

fn cmd_verify(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let spec = cfg.grid_spec()?;
    let opts = &cfg.options;
    let phi = bump(&cfg.bump_center(), opts.bump_radius, opts.bump_amplitude, &spec)?;
    // characteristic functional of the white-noise pairing
    let n = opts.samples.max(1000);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n as u64 {
        let noise = simulate_cells(&cfg.triplet, &spec, cfg.sim.delta, cfg.sim.seed, k)?;
        samples.push(pair_whitenoise(&noise, &phi.data)?);
    }
    let u = cfg.u_grid();
    let rep = stats::char_functional_test(&cfg.triplet, &phi.data, &samples, &u)?;
    let mut csv = File::create(out.join("char_functional.csv"))?;
    csv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    writeln!(csv, "u,re_emp,im_emp,re_theo,im_theo")?;
    for (i, &ui) in rep.u.iter().enumerate() {
        writeln!(
            csv,
            "{ui},{:e},{:e},{:e},{:e}",
            rep.empirical[i].re, rep.empirical[i].im, rep.theoretical[i].re,
            rep.theoretical[i].im
        )?;
    }
    println!(
        "characteristic functional: sup deviation {:.4e} over {} samples (bound 4/sqrt(N) = {:.4e})",
        rep.sup_deviation,
        rep.samples,
        4.0 / (rep.samples as f64).sqrt()
    );

    // moment scan across refinements when requested
    if opts.refinements.len() >= 2 {
        let mut fields: Vec<FieldRealization<f64>> = Vec::new();
        for &cells in &opts.refinements {
            let extent: Vec<f64> = spec
                .dims
                .iter()
                .zip(&spec.spacing)
                .map(|(&n0, &h0)| n0 as f64 * h0)
                .collect();
            let rspec = GridSpec::new(
                vec![cells; spec.d()],
                extent.iter().map(|e| e / cells as f64).collect(),
                vec![0.0; spec.d()],
            )?;
            let kernel = build_kernel(cfg, &rspec, fft)?;
            for stream in 0..cfg.sim.streams {
                let noise =
                    simulate_cells(&cfg.triplet, &rspec, cfg.sim.delta, cfg.sim.seed, stream)?;
                fields.push(simulate_mild_with(&kernel, &noise, fft, opts.wrap_tol)?);
            }
        }
        let scan = stats::moment_scan(&fields, &opts.betas)?;
        let mut mcsv = File::create(out.join("moments.csv"))?;
        mcsv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
        writeln!(mcsv, "cells,beta,moment")?;
        for (cells, beta, m) in &scan.rows {
            writeln!(mcsv, "{cells},{beta},{m:e}")?;
        }
        for (beta, flag) in &scan.flags {
            println!(
                "beta = {beta}: divergence suspected = {flag} (trend heuristic, see moments.csv)"
            );
        }
    }
    Ok(())
}

fn cmd_spectrum(
    cfg: &ExperimentConfig,
    hash: u64,
    out: &Path,
    fft: &mut NdFft<f64>,
) -> levyfield::Result<()> {
    let spec = cfg.grid_spec()?;
    let opts = &cfg.options;
    let kernel = build_kernel(cfg, &spec, fft)?;
    let p = cfg.poly_p()?;
    let q = cfg.poly_q()?;
    let sigma2 = cfg
        .triplet
        .cell_moments(1.0)
        .variance
        .ok_or_else(|| Error::precondition("noise variance does not exist"))?;
    let mut fields = Vec::with_capacity(cfg.sim.streams as usize);
    for stream in 0..cfg.sim.streams {
        let noise = simulate_cells(&cfg.triplet, &spec, cfg.sim.delta, cfg.sim.seed, stream)?;
        fields.push(simulate_mild_with(&kernel, &noise, fft, opts.wrap_tol)?);
    }
    let rep = stats::periodogram_compare(&fields, &p, &q, sigma2, opts.band, fft)?;
    println!(
        "periodogram: relative L1 error {:.4e} on {} bins over {} realizations",
        rep.rel_l1, rep.band_bins, rep.realizations
    );
    // model spectral density along the first axis for plotting
    let freqs = spec.frequencies(0);
    let mut xis: Vec<Vec<f64>> = Vec::new();
    for &f0 in freqs.iter().take(spec.dims[0].div_ceil(2)) {
        let mut xi = vec![0.0; spec.d()];
        xi[0] = f0;
        xis.push(xi);
    }
    let model = stats::spectral_density(&p, &q, sigma2, &xis)?;
    let mut csv = File::create(out.join("spectral_density.csv"))?;
    csv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    writeln!(csv, "xi,model")?;
    for (xi, m) in xis.iter().zip(&model) {
        writeln!(csv, "{},{m:e}", xi[0])?;
    }
    let rows = stats::autocovariance_compare(&fields, &kernel, sigma2, &opts.lags, fft)?;
    let mut acsv = File::create(out.join("autocovariance.csv"))?;
    acsv.write_all(meta_line(hash, cfg.sim.seed).as_bytes())?;
    writeln!(acsv, "lag,empirical,theoretical,std_error")?;
    for r in &rows {
        writeln!(
            acsv,
            "\"{:?}\",{:e},{:e},{:e}",
            r.lag, r.empirical, r.theoretical, r.std_error
        )?;
    }
    Ok(())
}
