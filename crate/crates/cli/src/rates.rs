//! Default sweep of the scalar bounds and convergence rates.

use hyperheat::oracle::{quadrature_rate_check, rate_check_p, rate_check_t, tail_bound_check};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub check: String,
    pub param: String,
    pub observed: f64,
    pub bound_or_bracket: String,
    pub pass: bool,
}

fn bracket_row(check: &str, param: String, order: Option<f64>, lo: f64, hi: f64) -> RateRow {
    let observed = order.unwrap_or(f64::NAN);
    RateRow {
        check: check.to_string(),
        param,
        observed,
        bound_or_bracket: format!("[{lo}, {hi}]"),
        pass: (lo..=hi).contains(&observed),
    }
}

fn list<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn run_rates() -> Result<Vec<RateRow>, CliError> {
    let mut rows = Vec::new();

    let p_ns: Vec<u64> = (0..=6).map(|e| 10u64.pow(e)).collect();
    let p = rate_check_p(&p_ns)?;
    for r in &p.rows {
        rows.push(RateRow {
            check: "p_bound".into(),
            param: format!("n={}", r.n),
            observed: r.modulus,
            bound_or_bracket: r.bound.to_string(),
            pass: r.holds(),
        });
    }
    let fit_ns: Vec<u64> = p_ns.iter().copied().filter(|&n| n >= 100).collect();
    let p_fit = rate_check_p(&fit_ns)?;
    rows.push(bracket_row("p_order", format!("n={}", list(&fit_ns)), p_fit.order, 0.8, 1.2));

    let t_ns = [100, 1000, 10_000];
    let t = rate_check_t(&[1.0, 5.0], &t_ns)?;
    let y1 = &t[0];
    rows.push(bracket_row("t_order", format!("y=1;n={}", list(&t_ns)), y1.order, 0.8, 1.2));
    rows.push(RateRow {
        check: "t_decreasing".into(),
        param: format!("y=1;n={}", list(&t_ns)),
        observed: *y1.residuals.last().expect("non-empty"),
        bound_or_bracket: "strictly decreasing".into(),
        pass: y1.decreasing(),
    });
    let y5 = &t[1];
    rows.push(RateRow {
        check: "t_vanishing".into(),
        param: "y=5;n=10000".into(),
        observed: y5.moduli[2],
        bound_or_bracket: "0.001".into(),
        pass: y5.moduli[2] <= 1e-3,
    });

    for (tt, threshold) in [(1.0, 1.0), (0.25, 2.0)] {
        let tail = tail_bound_check(tt, threshold, 100)?;
        rows.push(RateRow {
            check: "tail_bound".into(),
            param: format!("t={tt};threshold={threshold};n=100"),
            observed: tail.sum,
            bound_or_bracket: tail.bound.to_string(),
            pass: tail.holds(),
        });
    }

    let q_ns = [64, 128, 256];
    let q = quadrature_rate_check(1.0, 0.0, &q_ns)?;
    rows.push(bracket_row("quadrature_order", format!("t=1;z=0;n={}", list(&q_ns)), q.order, 0.8, 1.5));
    rows.push(RateRow {
        check: "quadrature_decreasing".into(),
        param: format!("t=1;z=0;n={}", list(&q_ns)),
        observed: q.rows[2].propagator_error,
        bound_or_bracket: "strictly decreasing".into(),
        pass: q.decreasing(),
    });
    let q1 = quadrature_rate_check(1.0, 1.0, &[256])?;
    rows.push(RateRow {
        check: "quadrature_error".into(),
        param: "t=1;z=1;n=256".into(),
        observed: q1.rows[0].propagator_error,
        bound_or_bracket: "0.01".into(),
        pass: q1.rows[0].propagator_error <= 1e-2,
    });

    Ok(rows)
}
