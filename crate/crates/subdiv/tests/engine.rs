use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;
use subdiv::engine::{best_move, build_table, mex, outcome, sg_value, Boundary, GameSpec, Move, Outcome};

/// Top-down evaluation over explicit move lists, memoized by position.
struct TreeOracle {
    a: u64,
    b: u64,
    virtual_child: Option<u8>,
    sg: HashMap<u64, u8>,
    win: HashMap<u64, bool>,
}

impl TreeOracle {
    fn new(a: u64, b: u64, virtual_child: Option<u8>) -> Self {
        TreeOracle { a, b, virtual_child, sg: HashMap::new(), win: HashMap::new() }
    }

    fn moves(&self, n: u64) -> Vec<u64> {
        if n == 1 {
            return Vec::new();
        }
        let mut out = Vec::new();
        if n > self.a {
            out.push(n - self.a);
        }
        out.push(n.div_ceil(self.b));
        out
    }

    fn sg(&mut self, n: u64) -> u8 {
        if let Some(&v) = self.sg.get(&n) {
            return v;
        }
        let v = if n == 1 {
            0
        } else {
            let mut seen: Vec<u8> = self.moves(n).into_iter().map(|m| self.sg(m)).collect();
            if n <= self.a {
                if let Some(v) = self.virtual_child {
                    seen.push(v);
                }
            }
            (0u8..).find(|v| !seen.contains(v)).unwrap()
        };
        self.sg.insert(n, v);
        v
    }

    /// Win/loss by plain minimax: a position wins iff some move reaches a loss.
    fn wins(&mut self, n: u64) -> bool {
        if let Some(&w) = self.win.get(&n) {
            return w;
        }
        let w = self.moves(n).into_iter().any(|m| !self.wins(m));
        self.win.insert(n, w);
        w
    }
}

fn values(a: u64, b: u64, n_max: u64) -> Vec<u8> {
    build_table(&GameSpec::new(a, b).unwrap(), n_max).unwrap().values().to_vec()
}

#[test]
fn mex_examples() {
    assert_eq!(mex([]), 0);
    assert_eq!(mex([0, 1]), 2);
    assert_eq!(mex([0, 2]), 1);
    assert_eq!(mex([1, 2]), 0);
}

#[test]
fn sequence_1_2() {
    assert_eq!(values(1, 2, 10), vec![0, 1, 0, 2, 1, 2, 0, 1, 0, 2]);
}

#[test]
fn sequence_2_2_listing() {
    let expected = [0, 2, 1, 0, 0, 2, 1, 1, 2, 2, 0, 0, 2, 2, 0, 0, 1, 1, 0, 0, 1, 1, 2, 2];
    assert_eq!(values(2, 2, 24), expected.to_vec());
}

#[test]
fn subtract_disallowed_changes_second_value() {
    let spec = GameSpec::new(2, 2).unwrap().with_boundary(Boundary::SubtractDisallowed);
    let t = build_table(&spec, 24).unwrap();
    // Only the division child remains, so SG(2) = mex{SG(1)} = 1.
    assert_eq!(sg_value(&t, 2).unwrap(), 1);
}

#[test]
fn misere_override() {
    let spec = GameSpec::new(1, 2).unwrap().with_overrides(BTreeMap::from([(1, 1)])).unwrap();
    let t = build_table(&spec, 9).unwrap();
    assert_eq!(t.values(), &[1, 0, 1, 2, 0, 2, 0, 1, 2]);
}

#[test]
fn lookups() {
    let t = build_table(&GameSpec::new(1, 2).unwrap(), 20).unwrap();
    assert_eq!(sg_value(&t, 1).unwrap(), 0);
    assert_eq!(sg_value(&t, 7).unwrap(), 0);
    assert!(sg_value(&t, 0).is_err());
    assert!(sg_value(&t, 21).is_err());
    let t22 = build_table(&GameSpec::new(2, 2).unwrap(), 24).unwrap();
    assert_eq!(sg_value(&t22, 2).unwrap(), 2);

    assert_eq!(outcome(&t, 2).unwrap(), Outcome::FirstPlayerWin);
    assert_eq!(outcome(&t, 9).unwrap(), Outcome::FirstPlayerLoss);
    assert_eq!(outcome(&t, 1).unwrap(), Outcome::FirstPlayerLoss);

    assert_eq!(best_move(&t, 4).unwrap(), Some(Move::Subtract { to: 3 }));
    assert_eq!(best_move(&t, 9).unwrap(), None);
    assert_eq!(best_move(&t, 2).unwrap(), Some(Move::Subtract { to: 1 }));
    assert_eq!(best_move(&t, 1).unwrap(), None);
    // 6 -> 5 has SG 1, 6 -> 3 has SG 0.
    assert_eq!(best_move(&t, 6).unwrap(), Some(Move::Divide { to: 3 }));
}

#[test]
fn config_errors() {
    assert!(GameSpec::new(0, 2).is_err());
    assert!(GameSpec::new(1, 1).is_err());
    assert!(GameSpec::new(1, 2).unwrap().with_overrides(BTreeMap::from([(1, 3)])).is_err());
    assert!(GameSpec::new(1, 2).unwrap().with_overrides(BTreeMap::from([(0, 1)])).is_err());
    let spec = GameSpec::new(1, 2).unwrap().with_overrides(BTreeMap::from([(5, 1)])).unwrap();
    assert!(build_table(&spec, 4).is_err());
    assert!(build_table(&GameSpec::new(1, 2).unwrap(), 0).is_err());
}

#[test]
fn matches_game_tree_oracle() {
    for &(a, b) in &[(1, 2), (2, 2), (3, 2), (1, 3), (2, 4), (4, 2), (5, 3), (6, 4), (3, 7)] {
        for boundary in [Boundary::VirtualValue(1), Boundary::SubtractDisallowed] {
            let virtual_child = match boundary {
                Boundary::VirtualValue(v) => Some(v),
                Boundary::SubtractDisallowed => None,
            };
            let spec = GameSpec::new(a, b).unwrap().with_boundary(boundary);
            let t = build_table(&spec, 2000).unwrap();
            let mut oracle = TreeOracle::new(a, b, virtual_child);
            for n in 1..=2000 {
                let v = sg_value(&t, n).unwrap();
                assert_eq!(v, oracle.sg(n), "SG mismatch a={a} b={b} n={n}");
                assert_eq!(v != 0, oracle.wins(n), "win/loss mismatch a={a} b={b} n={n}");
            }
        }
    }
}

#[test]
fn adjacent_values_differ_when_a_is_one() {
    for b in 2..=8 {
        let v = values(1, b, 100_000);
        assert!(v.windows(2).all(|w| w[0] != w[1]), "b={b}");
    }
}

proptest! {
    #[test]
    fn table_invariants(a in 1u64..9, b in 2u64..9, n_max in 1u64..3000) {
        let spec = GameSpec::new(a, b).unwrap();
        let t = build_table(&spec, n_max).unwrap();
        let again = build_table(&spec, n_max).unwrap();
        prop_assert_eq!(t.values(), again.values());
        for n in 1..=n_max {
            let v = sg_value(&t, n).unwrap();
            prop_assert!(v <= 2);
            if n == 1 {
                prop_assert_eq!(v, 0);
                continue;
            }
            let div = sg_value(&t, n.div_ceil(b)).unwrap();
            let sub = if n > a { sg_value(&t, n - a).unwrap() } else { 1 };
            prop_assert_eq!(v, mex([sub, div]));
            prop_assert_ne!(v, div);
        }
    }

    #[test]
    fn overrides_only_touch_their_indices(
        b in 2u64..6,
        prefix in proptest::collection::vec(0u8..3, 1..12),
    ) {
        let map: BTreeMap<u64, u8> =
            prefix.iter().enumerate().map(|(i, &v)| (i as u64 + 1, v)).collect();
        let spec = GameSpec::new(1, b).unwrap().with_overrides(map).unwrap();
        let t = build_table(&spec, 500).unwrap();
        for (i, &v) in prefix.iter().enumerate() {
            prop_assert_eq!(sg_value(&t, i as u64 + 1).unwrap(), v);
        }
        for n in prefix.len() as u64 + 1..=500 {
            let expect = mex([sg_value(&t, n - 1).unwrap(), sg_value(&t, n.div_ceil(b)).unwrap()]);
            prop_assert_eq!(sg_value(&t, n).unwrap(), expect);
        }
    }

    #[test]
    fn best_move_reaches_zero(a in 1u64..6, b in 2u64..6, n in 2u64..2000) {
        let t = build_table(&GameSpec::new(a, b).unwrap(), 2000).unwrap();
        match best_move(&t, n).unwrap() {
            Some(m) => {
                prop_assert!(sg_value(&t, n).unwrap() != 0);
                prop_assert_eq!(sg_value(&t, m.target()).unwrap(), 0);
            }
            None => prop_assert_eq!(sg_value(&t, n).unwrap(), 0),
        }
    }
}
