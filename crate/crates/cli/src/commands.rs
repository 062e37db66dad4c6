use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crkit::amenability::{amenable_bruteforce, check_cdef, is_amenable, Witness};
use crkit::cellgraph::{anisotropic_components, build, CellGraphData};
use crkit::fractional::{compact_probe, is_fractionally_isomorphic, CompactProbe};
use crkit::generators::random_gnm;
use crkit::io::save;
use crkit::mcvp::{reduce as reduce_circuit, verify_gate_propagation, MonotoneCircuit, Variant};
use crkit::oracles::{automorphisms, is_godsil, is_tinhofer_bruteforce};
use crkit::refinement::{is_discrete, refine_step, stable_partition};
use crkit::sweep::{sweep as sweep_all, ClassCounts, CompactStatus};
use crkit::tinhofer::{canonical_form, tinhofer_iso, Policy, Verdict};
use crkit::Partition;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::report::{json, CliError, CliResult, Run};
use crate::{BenchTarget, PolicyArg, Status};

fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn positive_if(b: bool) -> Status {
    if b {
        Status::Positive
    } else {
        Status::Negative
    }
}

pub fn refine(run: &mut Run, file: &str, trace: bool) -> CliResult<Status> {
    let g = run.graph(file)?;
    let (p, _) = run.timed("refine", || stable_partition(&g));
    if trace {
        let mut cur = Partition::from_colors(&g);
        let mut rounds = vec![cur.sizes()];
        loop {
            let next = refine_step(&g, &cur);
            if next.same_cells(&cur) {
                break;
            }
            rounds.push(next.sizes());
            cur = next;
        }
        for (i, sizes) in rounds.iter().enumerate() {
            run.line(format!(
                "round {i}: {} classes, sizes {}",
                sizes.len(),
                joined(sizes)
            ));
        }
        run.verdict("rounds", rounds.len() - 1);
        run.detail("round_sizes", &rounds);
    }
    for c in 0..p.num_classes() {
        run.line(format!("class {c}: {}", joined(p.class(c).as_slice())));
    }
    run.detail("class_of", p.labels());
    run.verdict("classes", p.num_classes());
    run.verdict("discrete", p.is_discrete());
    Ok(Status::Positive)
}

fn kind_name(kind: impl std::fmt::Debug) -> String {
    format!("{kind:?}").to_lowercase()
}

fn cell_text(run: &mut Run, cg: &CellGraphData) {
    for (i, label) in cg.cell_labels.iter().enumerate() {
        run.line(format!(
            "cell {i}: {} degree {} size {}: {}",
            kind_name(label.kind),
            label.degree,
            cg.size(i),
            joined(cg.partition.class(i).as_slice())
        ));
    }
    for pair in cg.pairs.values() {
        let iso = if pair.is_isotropic() {
            "isotropic"
        } else {
            "anisotropic"
        };
        run.line(format!(
            "pair {} {}: {iso} {:?} degrees {}/{}",
            pair.x, pair.y, pair.kind, pair.d_xy, pair.d_yx
        ));
    }
    for (i, comp) in anisotropic_components(cg).iter().enumerate() {
        let shape = if comp.is_tree { "tree" } else { "cyclic" };
        run.line(format!(
            "component {i}: cells {} {shape} root {}",
            joined(&comp.cells),
            comp.root
        ));
    }
}

fn cell_dot(cg: &CellGraphData) -> String {
    let mut out = String::from("graph cells {\n");
    for (i, label) in cg.cell_labels.iter().enumerate() {
        let _ = writeln!(
            out,
            "  c{i} [label=\"{i}: {} d={} |{}|\"];",
            kind_name(label.kind),
            label.degree,
            cg.size(i)
        );
    }
    for pair in cg.pairs.values() {
        let style = if pair.is_isotropic() {
            ", style=dashed"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  c{} -- c{} [label=\"{}/{}\"{style}];",
            pair.x, pair.y, pair.d_xy, pair.d_yx
        );
    }
    out.push('}');
    out
}

pub fn cellgraph(run: &mut Run, file: &str, dot: bool) -> CliResult<Status> {
    let g = run.graph(file)?;
    let cg = run.timed("cellgraph", || {
        let (p, _) = stable_partition(&g);
        build(&g, &p)
    })?;
    if dot {
        run.line(cell_dot(&cg));
    } else {
        cell_text(run, &cg);
    }
    run.detail("cell_labels", &cg.cell_labels);
    run.detail("pairs", cg.pairs.values().collect::<Vec<_>>());
    run.detail("components", anisotropic_components(&cg));
    run.verdict("cells", cg.num_cells());
    run.verdict("anisotropic_components", cg.components.len());
    Ok(Status::Positive)
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Cell(x) => format!("cell {x}"),
        Witness::Pair(x, y) => format!("pair {x} {y}"),
        Witness::Path(cells) => format!("path {}", joined(cells)),
        Witness::Cycle(cells) => format!("cycle {}", joined(cells)),
    }
}

pub fn amenable(run: &mut Run, file: &str, witness: bool, cross_check: bool) -> CliResult<Status> {
    let g = run.graph(file)?;
    let v = run.timed("amenable", || is_amenable(&g))?;
    run.verdict("amenable", v.amenable);
    if witness {
        if let Some(viol) = &v.violation {
            run.line(format!(
                "violation: condition {:?} at {}",
                viol.condition,
                witness_text(&viol.witness)
            ));
        }
        run.detail("violation", &v.violation);
    }
    if cross_check {
        let cdef = run.timed("check_cdef", || check_cdef(&g))?.amenable;
        run.verdict("check_cdef", cdef);
        let mut agree = cdef == v.amenable;
        if g.n() <= 7 {
            let mut budget = run.budget();
            let brute = run.timed("bruteforce", || amenable_bruteforce(&g, 7, &mut budget))?;
            run.verdict("bruteforce", brute);
            agree &= brute == v.amenable;
        }
        run.verdict("cross_check", if agree { "agree" } else { "disagree" });
        if !agree {
            return Ok(Status::Failure);
        }
    }
    Ok(positive_if(v.amenable))
}

pub fn iso(
    run: &mut Run,
    gp: &str,
    hp: &str,
    policy: PolicyArg,
    transcript: bool,
) -> CliResult<Status> {
    let g = run.graph(gp)?;
    let h = run.graph(hp)?;
    let policy = match policy {
        PolicyArg::Det => Policy::Deterministic,
        PolicyArg::Rand => Policy::SeededRandom(run.report.seed),
    };
    let r = run.timed("iso", || tinhofer_iso(&g, &h, policy));
    if transcript {
        for s in &r.transcript {
            run.line(format!(
                "round {}: class {}, individualize {} and {}",
                s.round, s.class, s.u, s.v
            ));
        }
        run.detail("transcript", &r.transcript);
    }
    match &r.verdict {
        Verdict::Isomorphic(map) => {
            run.line(format!("map: {}", joined(map)));
            run.detail("map", map);
        }
        Verdict::NonIsomorphic(why) => run.verdict("rejection", kind_name(why)),
    }
    run.verdict("isomorphic", r.is_isomorphic());
    Ok(positive_if(r.is_isomorphic()))
}

pub fn canon(run: &mut Run, file: &str) -> CliResult<Status> {
    let g = run.graph(file)?;
    let form = run.timed("canon", || canonical_form(&g));
    let hash = format!("{:x}", Sha256::digest(form.bytes()));
    run.line(format!("order: {}", joined(&form.order)));
    run.detail("order", &form.order);
    run.detail("position", &form.position);
    run.verdict("hash", hash);
    Ok(Status::Positive)
}

pub fn fractiso(run: &mut Run, gp: &str, hp: &str) -> CliResult<Status> {
    let g = run.graph(gp)?;
    let h = run.graph(hp)?;
    let feasible = run.timed("fractiso", || is_fractionally_isomorphic(&g, &h));
    run.verdict("fractionally_isomorphic", feasible);
    Ok(positive_if(feasible))
}

pub fn compact(run: &mut Run, file: &str, trials: usize, witness: bool) -> CliResult<Status> {
    let g = run.graph(file)?;
    // multigraphs have no amenability verdict, so they go straight to the probe
    let amenable = matches!(is_amenable(&g), Ok(v) if v.amenable);
    if amenable {
        run.line("amenable, hence compact");
        run.verdict("compact", CompactStatus::Theorem);
        return Ok(Status::Positive);
    }
    let seed = run.report.seed;
    let probe = run.timed("probe", || compact_probe(&g, trials, seed));
    match probe {
        CompactProbe::NonCompact { trial, witness: x } => {
            run.verdict("compact", CompactStatus::NonCompact);
            run.verdict("trial", trial);
            if witness {
                run.line(format!("witness from trial {trial}:"));
                run.line(x.to_string().trim_end());
                run.detail("witness", &x);
            }
            Ok(Status::Negative)
        }
        CompactProbe::NoCounterexampleFound { trials } => {
            run.verdict("compact", CompactStatus::NoCounterexampleFound);
            run.verdict("trials", trials);
            Ok(Status::Positive)
        }
    }
}

/// A verdict, or the `budget-exceeded` annotation when the oracle ran out.
fn annotated<T: Serialize>(r: crkit::Result<T>, exceeded: &mut bool) -> CliResult<Value> {
    match r {
        Ok(v) => Ok(json(v)),
        Err(crkit::Error::BudgetExceeded(_)) => {
            *exceeded = true;
            Ok(Value::from("budget-exceeded"))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn classify(run: &mut Run, file: &str, trials: usize) -> CliResult<Status> {
    let g = run.graph(file)?;
    let seed = run.report.seed;
    let mut exceeded = false;
    let discrete = run.timed("discrete", || is_discrete(&g));
    run.verdict("discrete", discrete);
    let amenable = run.timed("amenable", || is_amenable(&g))?.amenable;
    run.verdict("amenable", amenable);
    let probe = run.timed("compact", || compact_probe(&g, trials, seed));
    let compact = match (&probe, amenable) {
        (CompactProbe::NonCompact { .. }, _) => CompactStatus::NonCompact,
        (_, true) => CompactStatus::Theorem,
        (_, false) => CompactStatus::NoCounterexampleFound,
    };
    run.verdict("compact", compact);
    let mut budget = run.budget();
    let godsil = run.timed("godsil", || is_godsil(&g, &mut budget));
    let godsil = annotated(godsil, &mut exceeded)?;
    run.verdict("godsil", godsil);
    let mut budget = run.budget();
    let tinhofer = run.timed("tinhofer", || {
        is_tinhofer_bruteforce(&g, &mut budget).map(|t| t.is_none())
    });
    let tinhofer = annotated(tinhofer, &mut exceeded)?;
    run.verdict("tinhofer", tinhofer);
    let mut budget = run.budget();
    let aut = run.timed("automorphisms", || automorphisms(&g, &mut budget));
    let (refinable, order) = match aut {
        Ok(aut) => {
            let refinable = stable_partition(&g).0.same_cells(&aut.orbits);
            (json(refinable), json(aut.order()))
        }
        Err(e) => {
            let v = annotated::<bool>(Err(e), &mut exceeded)?;
            (v.clone(), v)
        }
    };
    run.verdict("refinable", refinable);
    run.verdict("aut_order", order);
    Ok(if exceeded {
        Status::BudgetExceeded
    } else {
        Status::Positive
    })
}

pub fn sweep(run: &mut Run, n: usize, trials: usize) -> CliResult<Status> {
    let seed = run.report.seed;
    let mut budget = run.budget();
    let r = run.timed("sweep", || sweep_all(n, trials, seed, &mut budget))?;
    run.line(format!(
        "{:<14}{:>12}{:>12}",
        "class", "iso-classes", "labeled"
    ));
    let rows = |c: &ClassCounts| {
        [
            ("all", c.total),
            ("discrete", c.discrete),
            ("amenable", c.amenable),
            ("probe-compact", c.probe_compact),
            ("godsil", c.godsil),
            ("tinhofer", c.tinhofer),
            ("refinable", c.refinable),
        ]
    };
    for ((name, classes), (_, labeled)) in rows(&r.classes).into_iter().zip(rows(&r.labeled)) {
        run.line(format!("{name:<14}{classes:>12}{labeled:>12}"));
    }
    for v in &r.violations {
        run.line(format!(
            "violation {}: {}",
            v.link,
            v.graph.trim_end().replace('\n', "; ")
        ));
    }
    run.detail("classes", r.classes);
    run.detail("labeled", r.labeled);
    run.detail("violations", &r.violations);
    run.verdict("inclusion_violations", r.violations.len());
    Ok(positive_if(r.violations.is_empty()))
}

pub fn reduce(
    run: &mut Run,
    circuit: &str,
    variant: &str,
    output: Option<&Path>,
) -> CliResult<Status> {
    let text = run.read(circuit)?;
    let c: MonotoneCircuit = text.parse().map_err(|source| CliError::Input {
        path: circuit.to_string(),
        source,
    })?;
    let variant: Variant = variant.parse()?;
    let out = run.timed("reduce", || reduce_circuit(&c, variant));
    let graph = save(&out.graph);
    match output {
        Some(path) => fs::write(path, &graph).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => {
            run.line(graph.trim_end());
            run.detail("graph", &graph);
        }
    }
    // G is checked gate by gate; in G' and G'' the output feeds back, so
    // only the whole-graph verdict is meaningful
    let consistent = match variant {
        Variant::G => {
            let ok = run.timed("verify", || verify_gate_propagation(&out, &c));
            run.verdict("propagation_verified", ok);
            ok
        }
        Variant::Gp | Variant::Gpp => {
            let discrete = run.timed("verify", || is_discrete(&out.graph));
            run.verdict("discrete", discrete);
            discrete == c.evaluate()
        }
    };
    run.detail("reduction", &out);
    run.verdict("circuit_value", c.evaluate());
    run.verdict("vertices", out.graph.n());
    run.verdict("edges", out.graph.num_edges());
    Ok(if consistent {
        Status::Positive
    } else {
        Status::Failure
    })
}

pub fn bench(
    run: &mut Run,
    target: BenchTarget,
    n: usize,
    m: usize,
    reps: usize,
) -> CliResult<Status> {
    let seed = run.report.seed;
    let g = run.timed("generate", || random_gnm(n, m, seed))?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        match target {
            BenchTarget::Refine => {
                std::hint::black_box(stable_partition(&g));
            }
            BenchTarget::Amenable => {
                std::hint::black_box(is_amenable(&g)?);
            }
        }
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let best = times.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let name = match target {
        BenchTarget::Refine => "refine",
        BenchTarget::Amenable => "amenable",
    };
    run.line(format!(
        "{name} n={n} m={m} reps={}: best {best:.3} ms, mean {mean:.3} ms",
        times.len()
    ));
    run.report
        .timings_ms
        .insert("best".into(), Value::from(best));
    run.report
        .timings_ms
        .insert("mean".into(), Value::from(mean));
    run.detail("runs_ms", &times);
    Ok(Status::Positive)
}
