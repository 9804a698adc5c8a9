//! The single point where lemmas become solver constraints.
//!
//! Counters are process-wide so tests can check that no unproven lemma was
//! ever assumed, across every engine entry point.

use std::sync::atomic::{AtomicU64, Ordering};

use super::Lemma;
use crate::ir::{Expr, TransitionSystem};

static ADMITTED: AtomicU64 = AtomicU64::new(0);
static UNPROVEN_ADMITTED: AtomicU64 = AtomicU64::new(0);
static REFUSED: AtomicU64 = AtomicU64::new(0);

/// Lemmas assumed so far in this process.
pub fn admitted() -> u64 {
    ADMITTED.load(Ordering::SeqCst)
}

/// Lemmas assumed without `Proven` status. Must stay 0.
pub fn unproven_admitted() -> u64 {
    UNPROVEN_ADMITTED.load(Ordering::SeqCst)
}

/// Lemmas handed to the engine but withheld because they were not proven.
pub fn refused() -> u64 {
    REFUSED.load(Ordering::SeqCst)
}

/// Proven lemmas only, in input order.
pub(crate) fn filter<'l>(lemmas: &'l [Lemma]) -> Vec<&'l Lemma> {
    lemmas
        .iter()
        .filter(|l| {
            if !l.is_proven() {
                REFUSED.fetch_add(1, Ordering::SeqCst);
                log::debug!("lemma {} withheld: status {:?}", l.name, l.status);
            }
            l.is_proven()
        })
        .collect()
}

/// Constraints asserted at every frame: the design's assumptions plus the
/// given lemmas. Records each admission.
pub(crate) fn constraints(ts: &TransitionSystem, admitted: &[&Lemma]) -> Vec<Expr> {
    let mut out: Vec<Expr> = ts.assumptions.iter().map(|a| a.expr.clone()).collect();
    for l in admitted {
        if l.is_proven() {
            ADMITTED.fetch_add(1, Ordering::SeqCst);
        } else {
            UNPROVEN_ADMITTED.fetch_add(1, Ordering::SeqCst);
        }
        out.push(l.expr.clone());
    }
    out
}
