//! Cross-checks the tableau against a dense statevector on small registers.

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rgs_core::gf2::BitMatrix;
use rgs_core::stabsim::{Pauli, PauliString, PauliWord, Tableau};

struct State {
    n: usize,
    amp: Vec<C>,
}

impl State {
    fn graph(adj: &BitMatrix) -> Self {
        let n = adj.rows();
        let norm = (1.0 / (1u64 << n) as f64).sqrt();
        let amp = (0..1usize << n)
            .map(|b| {
                let mut parity = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if adj.get(i, j) && (b >> i) & 1 == 1 && (b >> j) & 1 == 1 {
                            parity ^= 1;
                        }
                    }
                }
                C::new(if parity == 1 { -norm } else { norm }, 0.0)
            })
            .collect();
        State { n, amp }
    }

    fn h(&mut self, q: usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for b in 0..self.amp.len() {
            if (b >> q) & 1 == 0 {
                let (a0, a1) = (self.amp[b], self.amp[b | 1 << q]);
                self.amp[b] = (a0 + a1) * s;
                self.amp[b | 1 << q] = (a0 - a1) * s;
            }
        }
    }

    fn s(&mut self, q: usize) {
        for b in 0..self.amp.len() {
            if (b >> q) & 1 == 1 {
                self.amp[b] *= C::i();
            }
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        for b in 0..self.amp.len() {
            if (b >> c) & 1 == 1 && (b >> t) & 1 == 0 {
                self.amp.swap(b, b | 1 << t);
            }
        }
    }

    fn apply(&self, p: &PauliString) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); self.amp.len()];
        for b in 0..self.amp.len() {
            let mut coeff = if p.is_negative() { C::new(-1.0, 0.0) } else { C::new(1.0, 0.0) };
            let mut nb = b;
            for q in 0..self.n {
                let bit = (b >> q) & 1 == 1;
                match p.get(q) {
                    Pauli::I => {}
                    Pauli::X => nb ^= 1 << q,
                    Pauli::Z => {
                        if bit {
                            coeff = -coeff;
                        }
                    }
                    Pauli::Y => {
                        nb ^= 1 << q;
                        coeff *= if bit { -C::i() } else { C::i() };
                    }
                }
            }
            out[nb] += coeff * self.amp[b];
        }
        out
    }

    fn is_stabilized_by(&self, p: &PauliString) -> bool {
        self.apply(p)
            .iter()
            .zip(&self.amp)
            .all(|(a, b)| (a - b).norm() < 1e-9)
    }

    /// Projects onto the `outcome` eigenspace; returns its prior probability.
    fn project(&mut self, p: &PauliString, outcome: u8) -> f64 {
        let pa = self.apply(p);
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let proj: Vec<C> = self
            .amp
            .iter()
            .zip(&pa)
            .map(|(a, b)| (a + b * sign) * 0.5)
            .collect();
        let prob: f64 = proj.iter().map(|c| c.norm_sqr()).sum();
        if prob > 1e-12 {
            let scale = 1.0 / prob.sqrt();
            self.amp = proj.into_iter().map(|c| c * scale).collect();
        }
        prob
    }
}

#[derive(Debug, Clone)]
enum Op {
    H(usize),
    S(usize),
    Cnot(usize, usize),
    Measure(Vec<(usize, u8)>),
}

fn op_strategy(n: usize) -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..n).prop_map(Op::H),
        (0..n).prop_map(Op::S),
        (0..n, 0..n)
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| Op::Cnot(a, b)),
        prop::collection::vec((0..n, 1u8..4), 1..3).prop_map(Op::Measure),
    ]
}

fn adjacency_strategy(n: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let mut a = BitMatrix::zeros(n, n);
        let mut it = bits.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                if it.next().unwrap() {
                    a.set(i, j, true);
                    a.set(j, i, true);
                }
            }
        }
        a
    })
}

fn word(spec: &[(usize, u8)]) -> PauliWord {
    let mut seen = std::collections::BTreeMap::new();
    for &(q, p) in spec {
        seen.entry(q).or_insert(match p {
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        });
    }
    PauliWord(seen.into_iter().collect())
}

fn circuit() -> impl Strategy<Value = (BitMatrix, Vec<Op>, u64)> {
    (2usize..=5).prop_flat_map(|n| {
        (
            adjacency_strategy(n),
            prop::collection::vec(op_strategy(n), 0..25),
            any::<u64>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tableau_matches_statevector((adj, ops, seed) in circuit()) {
        let mut t = Tableau::graph_state(&adj).unwrap();
        let mut psi = State::graph(&adj);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = adj.rows();
        for op in &ops {
            match op {
                Op::H(q) => { t.apply_h(*q).unwrap(); psi.h(*q); }
                Op::S(q) => { t.apply_s(*q).unwrap(); psi.s(*q); }
                Op::Cnot(c, g) => { t.apply_cnot(*c, *g).unwrap(); psi.cnot(*c, *g); }
                Op::Measure(spec) => {
                    let w = word(spec);
                    let predicted = t.peek(&w).unwrap();
                    let outcome = t.measure(&w, &mut rng).unwrap();
                    let prob = psi.project(&PauliString::from_word(n, &w).unwrap(), outcome);
                    match predicted {
                        Some(o) => {
                            prop_assert_eq!(o, outcome);
                            prop_assert!((prob - 1.0).abs() < 1e-9);
                        }
                        None => prop_assert!((prob - 0.5).abs() < 1e-9),
                    }
                }
            }
            prop_assert!(t.check_invariants());
        }
        for s in t.stabilizers() {
            prop_assert!(psi.is_stabilized_by(&s), "{} does not stabilize", s);
        }
        for s in t.canonical_form() {
            prop_assert!(psi.is_stabilized_by(&s));
        }
    }

    #[test]
    fn canonical_form_is_a_state_invariant(adj in (2usize..=6).prop_flat_map(adjacency_strategy), a in 0usize..6, b in 0usize..6) {
        let n = adj.rows();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let t = Tableau::graph_state(&adj).unwrap();
        let mut u = t.clone();
        // CNOT squared and H squared are identities
        u.apply_cnot(a, b).unwrap();
        u.apply_h(a).unwrap();
        u.apply_h(a).unwrap();
        u.apply_cnot(a, b).unwrap();
        prop_assert_eq!(u.canonical_form(), t.canonical_form());
    }
}

#[test]
fn canonical_form_tells_states_apart() {
    let mut a = BitMatrix::zeros(3, 3);
    a.set(0, 1, true);
    a.set(1, 0, true);
    let t = Tableau::graph_state(&a).unwrap();
    let mut u = t.clone();
    u.apply_z(2).unwrap();
    assert_ne!(t.canonical_form(), u.canonical_form());
}
