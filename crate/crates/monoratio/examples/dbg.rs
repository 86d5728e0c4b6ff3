use monoratio::kernels::*;
fn main() {
    let grid = VerifyGrid::default();
    for kernel in DiscreteKernel::ALL {
        for &class in kernel.declared_classes() {
            let r = verify_discrete_class(kernel, class, &grid).unwrap();
            if !r.passed {
                for c in &r.conditions {
                    if !c.passed {
                        println!("DISCRETE {kernel:?} {class:?}: FAIL {} witness {:?}", c.condition, c.witness);
                    }
                }
            }
        }
    }
    for kernel in ContinuousKernel::ALL {
        for &class in kernel.declared_classes() {
            let r = verify_continuous_class(kernel, class, &grid).unwrap();
            if !r.passed {
                for c in &r.conditions {
                    if !c.passed {
                        println!("CONTINUOUS {kernel:?} {class:?}: FAIL {} witness {:?}", c.condition, c.witness);
                    }
                }
            }
        }
    }
    println!("done");
}
