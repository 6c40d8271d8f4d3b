//! Prox-mapping for each regularizer and feasible set.

use dynbatch::prox::{prox_step, reg_value, supported, ConstraintSpec, RegularizerSpec};

fn main() -> dynbatch::error::Result<()> {
    let y = [2.0, -0.4, 0.9];
    let u = [1.0, 0.5, -1.0];
    let alpha = 0.5;
    let regs = [
        RegularizerSpec::Zero,
        RegularizerSpec::L1 { lambda: 0.5 },
        RegularizerSpec::SquaredL2 { lambda: 0.5 },
        RegularizerSpec::ElasticNet { lambda: 0.5, gamma: 0.5 },
    ];
    let sets = [ConstraintSpec::AllSpace, ConstraintSpec::uniform_box(3, -1.0, 1.0), ConstraintSpec::centered_ball(3, 1.0)];
    println!("y = {y:?}, u = {u:?}, alpha = {alpha}");
    for cons in &sets {
        for reg in &regs {
            if !supported(reg, cons) {
                println!("{:>11} on {:>9}: unsupported", reg.name(), cons.name());
                continue;
            }
            let z = prox_step(reg, cons, &y, &u, alpha)?;
            println!("{:>11} on {:>9}: z = [{:+.4}, {:+.4}, {:+.4}]  phi(z) = {:.4}", reg.name(), cons.name(), z[0], z[1], z[2], reg_value(reg, &z));
        }
    }
    Ok(())
}
