//! Closed-form predictions for the two-choice deletion process over
//! `c * p` queues, assuming elements are spread uniformly at random and no
//! queue is locked. Measured values typically land above these figures;
//! treat them as baselines, not assertions about a concrete run.

/// Probability that a deletion returns the element of rank `i` (1-based):
/// the `i - 1` smaller elements must miss both inspected queues and the
/// rank-`i` element must be present.
pub fn rank_pmf(i: u64, c: usize, p: usize) -> f64 {
    assert!(i >= 1, "ranks are 1-based");
    let theta = two_choice_hit_probability(c, p);
    (1.0 - theta).powi((i - 1) as i32) * theta
}

/// Probability that the rank of a deleted element exceeds `k`.
pub fn rank_tail(k: f64, c: usize, p: usize) -> f64 {
    assert!(k >= 0.0);
    let theta = two_choice_hit_probability(c, p);
    (1.0 - theta).powf(k)
}

/// Expected rank error: the mean of the geometric rank distribution.
pub fn expected_rank_error(c: usize, p: usize) -> f64 {
    1.0 / two_choice_hit_probability(c, p)
}

/// Expected delay; an element is removed rather than overtaken with
/// constant probability, so delays follow the same geometric law.
pub fn expected_delay(c: usize, p: usize) -> f64 {
    expected_rank_error(c, p)
}

fn two_choice_hit_probability(c: usize, p: usize) -> f64 {
    let queues = c.checked_mul(p).expect("c * p overflows");
    assert!(queues >= 2, "need at least two queues, got c*p = {queues}");
    2.0 / queues as f64
}
