//! Subcommand implementations. Each returns Ok(true) on success, Ok(false)
//! when a verification-style check fails (exit code 1), and Err for
//! usage or computation errors.

use crate::config::{parse_orders, parse_param, parse_viewport, pick, pick_opt, ConfigFile, Provenance};
use crate::writers;
use crate::Common;
use anyhow::{anyhow, bail, Context, Result};
use maskit_core::chains;
use maskit_core::discreteness::{self, Region, Verdict};
use maskit_core::families;
use maskit_core::farey::Fraction;
use maskit_core::limitset;
use maskit_core::locus::{self, TraceFunction};
use num_complex::Complex64 as Complex;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

struct Merged {
    frac: Option<String>,
    n: Option<String>,
    family: String,
    tol: f64,
    depth: u32,
    grid: usize,
    out: Option<PathBuf>,
    viewport: Option<String>,
    param: Option<Complex>,
    min_cell: f64,
    size: usize,
    window: Option<usize>,
}

fn merge(c: &Common) -> Result<Merged> {
    let file = match &c.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let param = match pick_opt(c.param.clone(), file.param.clone()) {
        Some(s) => Some(parse_param(&s)?),
        None => None,
    };
    Ok(Merged {
        frac: pick_opt(c.frac.clone(), file.frac.clone()),
        n: pick_opt(c.n.clone(), file.n.clone()),
        family: pick(c.family.clone(), file.family.clone(), "maskit".into()),
        tol: pick(c.tol, file.tol, 1e-9),
        depth: pick(c.depth, file.depth, 12),
        grid: pick(c.grid, file.grid, 41),
        out: pick_opt(c.out.clone(), file.out.clone().map(PathBuf::from)),
        viewport: pick_opt(c.viewport.clone(), file.viewport.clone()),
        param,
        min_cell: pick(c.min_cell, file.min_cell, 2e-3),
        size: pick(c.size, file.size, 800),
        window: pick_opt(c.window, file.window),
    })
}

fn need_frac(m: &Merged) -> Result<Fraction> {
    let s = m.frac.as_ref().ok_or_else(|| anyhow!("--frac is required"))?;
    Fraction::parse(s).map_err(|e| anyhow!("{e}"))
}

fn need_single_n(m: &Merged) -> Result<u32> {
    let s = m.n.as_ref().ok_or_else(|| anyhow!("--n is required"))?;
    let orders = parse_orders(s)?;
    if orders.len() != 1 {
        bail!("this command takes a single --n");
    }
    Ok(orders[0])
}

fn nice_c(z: Complex) -> String {
    let trim = |x: f64| {
        let s = format!("{x:.8}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s.is_empty() || s == "-" {
            "0".to_string()
        } else {
            s.to_string()
        }
    };
    format!("{}{}{}i", trim(z.re), if z.im < 0.0 { "-" } else { "+" }, trim(z.im.abs()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn ray(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    let mut prov = Provenance::new("ray");
    prov.add("family", &m.family).add("frac", f);
    let ray = match m.family.as_str() {
        "maskit" => {
            let tf = TraceFunction::maskit(f);
            locus::trace_ray(&tf, 12.0, 0.05, 0.05).map_err(|e| anyhow!("{e}"))?
        }
        "koebe" => {
            let n = need_single_n(&m)? as i64;
            prov.add("n", n);
            locus::koebe_ray(n, f).map_err(|e| anyhow!("{e}"))?
        }
        other => bail!("unknown family {other} (expected maskit or koebe)"),
    };
    if let Some(cusp) = ray.cusp() {
        match ray.family {
            locus::Family::Maskit => {
                println!("cusp mu = {} (residual {:.2e})", nice_c(cusp.param), cusp.residual);
            }
            locus::Family::Koebe(_) => {
                let t2 = cusp.param * cusp.param;
                println!(
                    "boundary tau = {} tau^2 = {} (residual {:.2e})",
                    nice_c(cusp.param),
                    nice_c(t2),
                    cusp.residual
                );
            }
        }
    }
    if let Some(p) = ray.aborted {
        eprintln!("warning: continuation stopped near {} (possible branch point)", nice_c(p));
    }
    if let Some(out) = &m.out {
        if out.extension().and_then(|e| e.to_str()) == Some("svg") {
            let items = vec![writers::SvgItem::Polyline {
                points: ray.samples.iter().map(|s| s.param).collect(),
            }];
            write_bytes(out, writers::svg_document(&items, Some(&prov.line())).as_bytes())?;
        } else {
            let body = writers::ray_csv(&ray);
            write_bytes(out, format!("{}{}", prov.csv_header(), body).as_bytes())?;
        }
    }
    Ok(ray.cusp().is_some())
}

pub fn cusp(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    let sp = locus::maskit_cusp(f).map_err(|e| anyhow!("{e}"))?;
    println!("mu_{f} = {} (residual {:.2e})", nice_c(sp.param), sp.residual);
    Ok(sp.residual <= m.tol.max(1e-10) * 10.0)
}

pub fn elliptic(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    if m.family != "maskit" {
        bail!("elliptic points live on extended rays, which exist for the maskit family only");
    }
    let orders = parse_orders(m.n.as_deref().unwrap_or("2,3,4"))?;
    let ray = locus::maskit_ray_with_elliptics(f, &orders).map_err(|e| anyhow!("{e}"))?;
    let mut parts = Vec::new();
    for n in &orders {
        let sp = ray
            .elliptic(*n)
            .ok_or_else(|| anyhow!("no elliptic point for n = {n}"))?;
        parts.push(nice_c(sp.param));
    }
    println!("{}", parts.join(", "));
    if let Some(out) = &m.out {
        let mut prov = Provenance::new("elliptic");
        prov.add("frac", f).add(
            "n",
            orders
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        write_bytes(out, format!("{}{}", prov.csv_header(), writers::ray_csv(&ray)).as_bytes())?;
    }
    Ok(true)
}

pub fn chain(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    let chain = match &m.n {
        Some(_) => {
            let n = need_single_n(&m)?;
            match m.param {
                Some(mu) => chains::build_elliptic_chain_at(f, n, mu),
                None => chains::build_elliptic_chain(f, n),
            }
        }
        None => {
            let window = m.window.unwrap_or((2 * f.denom() + 2) as usize);
            match m.param {
                Some(mu) => chains::build_cusp_chain_at(f, window, mu),
                None => chains::build_cusp_chain(f, window),
            }
        }
    }
    .map_err(|e| anyhow!("{e}"))?;

    let report = chains::verify_combinatorial(&chain, &chain.x, &chain.z);
    for cond in &report.conditions {
        println!(
            "{:<40} {} residual {:.3e} {}",
            cond.name,
            if cond.pass { "pass" } else { "FAIL" },
            cond.residual,
            cond.note
        );
    }
    let curves = if chain.order.is_some() && report.all_pass {
        match chains::pleating_curves(&chain, &chain.z) {
            Ok(cv) => {
                println!(
                    "{:<40} {} margin {:.3e} jordan {}",
                    "pleating-interiors-disjoint",
                    if cv.interiors_disjoint { "pass" } else { "FAIL" },
                    cv.margin,
                    cv.jordan_ok
                );
                Some(cv)
            }
            Err(e) => {
                eprintln!("pleating curves unavailable: {e}");
                None
            }
        }
    } else {
        None
    };
    println!(
        "chain: {} disks at mu = {}; convention: {}",
        chain.disk_count(),
        nice_c(chain.mu),
        report.convention
    );

    if let Some(out) = &m.out {
        let mut prov = Provenance::new("chain");
        prov.add("frac", f).add("mu", nice_c(chain.mu));
        if let Some(n) = chain.order {
            prov.add("n", n);
        }
        let json = writers::chain_json(&chain, &report);
        write_bytes(
            &out.with_extension("json"),
            serde_json::to_string_pretty(&json)?.as_bytes(),
        )?;
        let items = writers::chain_svg_items(&chain, curves.as_ref());
        write_bytes(
            &out.with_extension("svg"),
            writers::svg_document(&items, Some(&prov.line())).as_bytes(),
        )?;
    }
    let ok = report.all_pass && curves.map(|cv| cv.interiors_disjoint).unwrap_or(true);
    Ok(ok)
}

pub fn scan(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    let n = need_single_n(&m)?;
    let region = match &m.viewport {
        Some(v) => {
            let (x0, y0, x1, y1) = parse_viewport(v)?;
            Region { x0, y0, x1, y1 }
        }
        None => {
            let ray = locus::maskit_ray_with_elliptics(f, &[n]).map_err(|e| anyhow!("{e}"))?;
            let center = ray
                .elliptic(n)
                .ok_or_else(|| anyhow!("no elliptic point for n = {n}"))?
                .param;
            Region::centered(center, 0.1)
        }
    };
    let grid = m.grid.max(1);
    let cells = discreteness::nondiscreteness_scan(region, f, n, grid);
    let violating = cells.iter().filter(|c| c.report.verdict == Verdict::Violating).count();
    let suspect = cells
        .iter()
        .filter(|c| c.report.verdict == Verdict::ElementarySuspect)
        .count();
    println!(
        "{} cells: {} violating (certified non-discrete), {} elementary-suspect",
        cells.len(),
        violating,
        suspect
    );
    if let Some(out) = &m.out {
        let mut prov = Provenance::new("scan");
        prov.add("frac", f)
            .add("n", n)
            .add("grid", grid)
            .add(
                "region",
                format!("{},{},{},{}", region.x0, region.y0, region.x1, region.y1),
            );
        write_bytes(
            &out.with_extension("csv"),
            format!("{}{}", prov.csv_header(), writers::scan_csv(&cells)).as_bytes(),
        )?;
        write_bytes(
            &out.with_extension("ppm"),
            &writers::scan_ppm(&cells, grid, &prov.line()),
        )?;
    }
    Ok(true)
}

pub fn conjugacy(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let n = need_single_n(&m)? as i64;
    if n < 3 {
        bail!("the conjugacy check needs n >= 3");
    }
    let beta = families::beta_conjugator(n).map_err(|e| anyhow!("{e}"))?;
    let mu0 = Complex::new(0.0, 2.0 * (PI / n as f64).cos());
    let g = families::maskit_group(mu0);
    let tau = families::tau_boundary_01(n).map_err(|e| anyhow!("{e}"))?;
    let k = families::koebe_group(n, Complex::new(tau, 0.0)).map_err(|e| anyhow!("{e}"))?;
    let bi = beta.inverse();
    let r1 = (beta * (g.s.inverse() * g.t.inverse() * g.s) * bi).psl_dist(&k.a);
    let r2 = (beta * g.t * bi).psl_dist(&k.b);
    let r3 = (beta * g.s * bi).psl_dist(&k.c.inverse());
    let max = r1.max(r2).max(r3);
    println!(
        "n = {n}: residuals A {r1:.3e}, B {r2:.3e}, C^-1 {r3:.3e}; max {max:.3e} (tau_0/1^2 = {})",
        writers::fmt_f(tau * tau)
    );
    Ok(max <= m.tol)
}

pub fn limitset(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let (gens, label) = match m.family.as_str() {
        "maskit" => {
            let mu = match m.param {
                Some(p) => p,
                None => {
                    let f = need_frac(&m)?;
                    let n = need_single_n(&m)?;
                    let ray = locus::maskit_ray_with_elliptics(f, &[n]).map_err(|e| anyhow!("{e}"))?;
                    ray.elliptic(n)
                        .ok_or_else(|| anyhow!("no elliptic point for n = {n}"))?
                        .param
                }
            };
            let g = families::maskit_group(mu);
            (vec![g.s, g.t], format!("mu={}", nice_c(mu)))
        }
        "koebe" => {
            let n = need_single_n(&m)? as i64;
            let tau = m
                .param
                .ok_or_else(|| anyhow!("koebe limit sets need --param re,im for tau"))?;
            let g = families::koebe_group(n, tau).map_err(|e| anyhow!("{e}"))?;
            // The deformation-space plot coordinate of this group.
            println!("i tr C = {}", nice_c(g.plot_coordinate()));
            (vec![g.a, g.c], format!("n={n} tau={}", nice_c(tau)))
        }
        other => bail!("unknown family {other}"),
    };
    let mut cloud = limitset::limit_set(&gens, m.depth, m.min_cell).map_err(|e| anyhow!("{e}"))?;
    if let Some(v) = &m.viewport {
        let (x0, y0, x1, y1) = parse_viewport(v)?;
        cloud.viewport = limitset::Viewport { x0, y0, x1, y1 };
    }
    println!(
        "{} points ({} nodes visited{})",
        cloud.points.len(),
        cloud.nodes_visited,
        if cloud.truncated { ", truncated by budget" } else { "" }
    );
    if let Some(out) = &m.out {
        let mut prov = Provenance::new("limitset");
        prov.add("family", &m.family)
            .add("params", &label)
            .add("depth", m.depth)
            .add("min_cell", m.min_cell)
            .add("size", m.size);
        write_bytes(out, &writers::raster_ppm(&cloud, m.size, m.size, &prov.line()))?;
        let csv_path = out.with_extension("csv");
        write_bytes(
            &csv_path,
            format!("{}{}", prov.csv_header(), writers::cloud_csv(&cloud)).as_bytes(),
        )?;
    }
    Ok(!cloud.points.is_empty())
}

pub fn signature(c: &Common) -> Result<bool> {
    let m = merge(c)?;
    let f = need_frac(&m)?;
    let mu = match m.param {
        Some(p) => p,
        None => {
            let n = need_single_n(&m)?;
            let ray = locus::maskit_ray_with_elliptics(f, &[n]).map_err(|e| anyhow!("{e}"))?;
            ray.elliptic(n)
                .ok_or_else(|| anyhow!("no elliptic point for n = {n}"))?
                .param
        }
    };
    let verdict = discreteness::triangle_signature(mu, f).map_err(|e| anyhow!("{e}"))?;
    println!("at mu = {}: {}", nice_c(mu), verdict);
    Ok(true)
}
