//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;

use num_complex::Complex64;
use orthosynth::batch::{run_bench, BenchConfig, Execution};
use orthosynth::circuit::{counts, export_text, import_text, optimize, simulate, Circuit, Gate};
use orthosynth::kak::{kak_factor, InvolutionSpec};
use orthosynth::mat::{phase_distance, ComplexMatrix};
use orthosynth::pauli::{
    basis_f, closure_check, commutator_identity_check, magic, magic_conjugate, ps, tables, Pauli,
};
use orthosynth::random::{haar_orthogonal, random_circuit, sample_rng};
use orthosynth::synth2::{emit_a2_circuit, synth_o4, synth_so4, SynthOptions};
use orthosynth::synth3::{emit_a1_circuit, emit_a_circuit, emit_atilde_circuit, emit_m_circuit, synth_so8};
use orthosynth::toolkit::check_paper;
use orthosynth::{EulerZYZ, Tolerances};
use rand::RngCore;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn only_ry(c: &Circuit) -> bool {
    c.gates().iter().all(|g| !matches!(g, Gate::Rot { axis: orthosynth::Axis::Z, .. }))
}

fn two_qubit_bound() -> Outcome {
    let opts = SynthOptions::default();
    let mut max_err: f64 = 0.0;
    let mut hist = BTreeMap::new();
    let mut ok = true;
    for i in 0..1000 {
        let x = haar_orthogonal(4, 1001, i, 1);
        let r = synth_so4(&x, &opts).expect("synthesis");
        max_err = max_err.max(r.reconstruction_error);
        let pair = r.counts.pair();
        *hist.entry(pair).or_insert(0u32) += 1;
        ok &= r.reconstruction_error < 1e-9 && pair.0 <= 2 && pair.1 <= 6 && only_ry(&r.circuit);
    }
    let exact = hist.get(&(2, 6)).copied().unwrap_or(0);
    outcome(
        ok && exact >= 990,
        format!("max error {max_err:.2e}, (2,6) hit {exact}/1000, histogram {hist:?}"),
    )
}

fn reflection_bound() -> Outcome {
    let opts = SynthOptions::default();
    let mut max_err: f64 = 0.0;
    let mut hist = BTreeMap::new();
    let mut ok = true;
    for i in 0..500 {
        let x = haar_orthogonal(4, 1002, i, -1);
        let r = synth_o4(&x, &opts).expect("synthesis");
        max_err = max_err.max(r.reconstruction_error);
        let pair = r.counts.pair();
        *hist.entry(pair).or_insert(0u32) += 1;
        ok &= r.reconstruction_error < 1e-9 && pair.0 <= 3 && pair.1 <= 6 && only_ry(&r.circuit);
    }
    outcome(ok, format!("max error {max_err:.2e}, histogram {hist:?}"))
}

fn three_qubit_bound() -> Outcome {
    let opts = SynthOptions::default();
    let (mut max_err, mut max_phase): (f64, f64) = (0.0, 0.0);
    let mut hist = BTreeMap::new();
    let mut ok = true;
    for i in 0..200 {
        let x = haar_orthogonal(8, 1003, i, 1);
        let r = synth_so8(&x, &opts).expect("synthesis");
        let phase_dev = (r.global_phase - 1.0).norm().min((r.global_phase + 1.0).norm());
        max_err = max_err.max(r.reconstruction_error);
        max_phase = max_phase.max(phase_dev);
        let (pair, raw) = (r.counts.pair(), r.raw_counts.pair());
        *hist.entry(pair).or_insert(0u32) += 1;
        ok &= r.reconstruction_error < 1e-8
            && phase_dev < 1e-8
            && pair.0 <= 16
            && pair.1 <= 36
            && raw == (16, 40)
            && raw.1 - pair.1 == 4
            && raw.0 == pair.0;
    }
    outcome(
        ok,
        format!("max error {max_err:.2e}, phase deviation {max_phase:.2e}, histogram {hist:?}"),
    )
}

fn r_triple(qubit: usize, e: &EulerZYZ) -> [Gate; 3] {
    [Gate::rz(qubit, e.psi), Gate::ry(qubit, e.phi), Gate::rz(qubit, e.theta)]
}

fn component_counts() -> Outcome {
    let m = counts(&emit_m_circuit(false)).pair();
    let a = counts(&emit_a_circuit(0.3, 0.2, -0.4, 0.9)).pair();
    let a1 = counts(&emit_a1_circuit(0.5, -0.7)).pair();

    // The eight R gates of a generic sample with the two A1 blocks between them.
    let x = haar_orthogonal(8, 1004, 0, 1);
    let r = synth_so8(&x, &SynthOptions::default()).expect("synthesis");
    let k = |i: usize| {
        let mut g = r_triple(1, &r.euler[2 * i]).to_vec();
        g.extend(r_triple(2, &r.euler[2 * i + 1]));
        g
    };
    let mut gates = k(3);
    gates.extend(emit_a1_circuit(r.inner_params[1][0], r.inner_params[1][1]).gates().iter().copied());
    let [pa, pb, pc, pd] = r.abelian_params;
    let middle = emit_a_circuit(pa, pb, pc, pd);
    gates.extend(k(2));
    gates.extend(middle.gates().iter().copied());
    gates.extend(k(1));
    gates.extend(emit_a1_circuit(r.inner_params[0][0], r.inner_params[0][1]).gates().iter().copied());
    gates.extend(k(0));
    let chain = Circuit::from_gates(3, gates).expect("valid gates");
    let on_controls = |c: &Circuit| {
        c.gates()
            .iter()
            .filter(|g| matches!(g, Gate::Rot { qubit, .. } if *qubit != 3))
            .count()
    };
    // The A block's two fixed Ry(±π/4) on qubit 2 are not part of the triples.
    let fixed = on_controls(&middle);
    let (pre, post) = (
        on_controls(&chain) - fixed,
        on_controls(&optimize(&chain, 1e-12)) - fixed,
    );
    outcome(
        m == (1, 3) && a == (6, 6) && a1 == (4, 2) && pre == 24 && post == 20,
        format!("M {m:?}, A {a:?}, A1 {a1:?}, R triples {pre} -> {post}"),
    )
}

fn pauli_exp(terms: &[(f64, &str)]) -> ComplexMatrix {
    let t: Vec<_> = terms.iter().map(|&(c, p)| (c, ps(p))).collect();
    common::exp_minus_i(&t)
}

fn circuit_identities() -> Outcome {
    let mut rng = sample_rng(1005, 0);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut note = |name: &'static str, v: f64| {
        let w = worst.entry(name).or_insert(0.0);
        *w = w.max(v);
    };
    let ry3 = |d: f64| simulate(&Circuit::from_gates(3, vec![Gate::ry(3, d)]).unwrap());
    let three = |g: Vec<Gate>| simulate(&Circuit::from_gates(3, g).unwrap());
    let m = magic();
    for _ in 0..100 {
        let p: [f64; 4] = std::array::from_fn(|_| common::angle(&mut rng));
        let [a, b, c, d] = p;
        note("A(a,b)", common::dist(&simulate(&emit_a2_circuit(a, b)), &pauli_exp(&[(a, "XY"), (b, "YZ")])));
        note(
            "block a",
            common::dist(&three(vec![Gate::cnot(2, 3), Gate::ry(3, a), Gate::cnot(2, 3)]), &pauli_exp(&[(a, "IZY")])),
        );
        note(
            "block b",
            common::dist(
                &three(vec![Gate::cnot(1, 3), Gate::cnot(2, 3), Gate::ry(3, -b), Gate::cnot(2, 3), Gate::cnot(1, 3)]),
                &pauli_exp(&[(-b, "ZZY")]),
            ),
        );
        note(
            "block c",
            common::dist(&three(vec![Gate::cnot(1, 3), Gate::ry(3, c), Gate::cnot(1, 3)]), &pauli_exp(&[(c, "ZIY")])),
        );
        let atilde = simulate(&emit_atilde_circuit(a, b, c));
        note("A-tilde", common::dist(&atilde, &pauli_exp(&[(a, "IZY"), (-b, "ZZY"), (c, "ZIY")])));
        let full = simulate(&emit_a_circuit(a, b, c, d));
        note(
            "A(a,b,c,d)",
            common::dist(&full, &pauli_exp(&[(a, "XXY"), (b, "YYY"), (c, "ZZY"), (d, "IIY")])),
        );
        note(
            "A1",
            common::dist(&simulate(&emit_a1_circuit(a, b)), &pauli_exp(&[(a, "IZZ"), (b, "ZIZ")])),
        );
        let conj = &(&(&m * &atilde) * &m.adjoint()) * &ry3(d);
        note("M A-tilde M' Ry3", common::dist(&conj, &full));
    }
    let (md, mphase) = phase_distance(&simulate(&emit_m_circuit(false)), &m).unwrap();
    let m_ok = md < 1e-12 && (mphase - 1.0).norm() < 1e-12;
    let ok = m_ok && worst.values().all(|&v| v < 1e-11);
    let max = worst.values().copied().fold(0.0, f64::max);
    outcome(
        ok,
        format!("{} identities x 100 draws, worst {max:.2e}; M circuit distance {md:.1e}, phase {mphase:.3}", worst.len()),
    )
}

fn algebra_suite() -> Outcome {
    let symbols = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut rng = sample_rng(1006, 0);
    let mut comm: f64 = 0.0;
    for _ in 0..50 {
        let mut pick = || symbols[(rng.next_u32() % 4) as usize];
        comm = comm.max(commutator_identity_check(pick(), pick(), pick(), pick()));
    }
    let t = tables();
    let mut closure: f64 = 0.0;
    for (l, p) in [(&t.so4_l, &t.so4_p), (&t.so8_l, &t.so8_p), (&t.l1, &t.p1)] {
        closure = closure.max(closure_check(l, l, l)).max(closure_check(l, p, p)).max(closure_check(p, p, l));
    }
    let f = basis_f();
    let sizes = [
        t.so4_l.len(),
        t.so4_p.len(),
        t.so4_a.len(),
        t.so8_l.len(),
        t.so8_p.len(),
        t.so8_a.len(),
        t.l1.len(),
        t.p1.len(),
        t.a1.len(),
        f.len(),
    ];
    let mut real: f64 = 0.0;
    for p in &f.elements {
        let g = magic_conjugate(&p.to_matrix().scale(Complex64::new(0.0, 1.0))).unwrap();
        real = real.max(g.max_imag()).max((&g + &g.transpose()).max_abs());
    }
    outcome(
        comm < 1e-13 && closure < 1e-12 && sizes == [2, 4, 2, 12, 16, 4, 6, 6, 2, 28] && real < 1e-12,
        format!("commutator {comm:.1e}, closure {closure:.1e}, sizes {sizes:?}, magic-real {real:.1e}"),
    )
}

fn kak_soundness() -> Outcome {
    let tol = Tolerances::default();
    let specs = [
        InvolutionSpec::two_qubit(),
        InvolutionSpec::three_qubit_outer(),
        InvolutionSpec::three_qubit_inner(),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (s, spec) in specs.into_iter().enumerate() {
        let mut rng = sample_rng(1007, s as u64);
        let (mut rec, mut fix, mut torus): (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut deterministic = true;
        for _ in 0..500 {
            let u = &(&common::random_element(&spec.l_basis, &mut rng)
                * &common::random_element(&spec.a_basis, &mut rng))
                * &common::random_element(&spec.l_basis, &mut rng);
            let r = match kak_factor(&u, spec, &tol) {
                Ok(r) => r,
                Err(e) => {
                    ok = false;
                    details.push(format!("{}: {e}", spec.name));
                    continue;
                }
            };
            rec = rec.max(r.reconstruction_error(&u));
            fix = fix.max(r.theta_residual(spec));
            let terms: Vec<_> = spec.a_basis.elements.iter().zip(&r.params).map(|(p, c)| (*c, *p)).collect();
            torus = torus.max(common::dist(&common::exp_minus_i(&terms), &r.a));
            deterministic &= kak_factor(&u, spec, &tol).ok().as_ref() == Some(&r);
        }
        ok &= rec < 1e-9 && fix < 1e-9 && torus < 1e-9 && deterministic;
        details.push(format!(
            "{}: rec {rec:.1e} theta {fix:.1e} torus {torus:.1e}{}",
            spec.name,
            if deterministic { "" } else { " NONDETERMINISTIC" }
        ));
    }
    outcome(ok, details.join("; "))
}

fn tooling_round_trips() -> Outcome {
    let mut rng = sample_rng(1008, 0);
    let mut round_trip = true;
    for k in 0..100 {
        let c = random_circuit(1 + k % 3, 40, &mut rng);
        round_trip &= import_text(&export_text(&c)).ok().as_ref() == Some(&c);
    }
    let mut bench_ok = true;
    let mut notes = Vec::new();
    for (qubits, det, samples) in [(2, 1, 1000), (2, -1, 500), (3, 1, 200)] {
        let cfg = BenchConfig {
            det,
            ..BenchConfig::new(qubits, samples, 7)
        };
        match run_bench(&cfg, Execution::default()) {
            Ok(r) => notes.push(format!("{} {} verified, worst {:?}", r.mode, r.records.len(), r.worst_case_counts)),
            Err(e) => {
                bench_ok = false;
                notes.push(e.to_string());
            }
        }
    }
    let identities = check_paper(false);
    outcome(
        round_trip && bench_ok && identities.exit_code() == 0,
        format!(
            "text round trip {}, bench [{}], check-paper exit {}",
            if round_trip { "ok" } else { "BROKEN" },
            notes.join(", "),
            identities.exit_code()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("two-qubit SO(4) bound", two_qubit_bound),
        ("two-qubit det -1 bound", reflection_bound),
        ("three-qubit SO(8) bound", three_qubit_bound),
        ("component gate counts", component_counts),
        ("circuit identities vs dense exponential", circuit_identities),
        ("algebraic property suite", algebra_suite),
        ("KAK engine soundness", kak_soundness),
        ("tooling round trips", tooling_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!("{} [{}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
