use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// Built-in basis functions with exact gradients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisFunction {
    /// `cos(<k, x>)` or `sin(<k, x>)`.
    Trig { freq: Vec<i32>, phase: Phase },
    /// `Π x_i^{e_i}`.
    Monomial { exps: Vec<u32> },
}

impl BasisFunction {
    pub fn arity(&self) -> usize {
        match self {
            BasisFunction::Trig { freq, .. } => freq.len(),
            BasisFunction::Monomial { exps } => exps.len(),
        }
    }

    pub fn value<T: Real>(&self, x: &[T]) -> T {
        match self {
            BasisFunction::Trig { freq, phase } => {
                let a = phase_arg(freq, x);
                match phase {
                    Phase::Cos => a.cos(),
                    Phase::Sin => a.sin(),
                }
            }
            BasisFunction::Monomial { exps } => {
                x.iter().zip(exps).fold(T::one(), |p, (&v, &e)| p * v.powi(e as i32))
            }
        }
    }

    pub fn gradient<T: Real>(&self, x: &[T], out: &mut [T]) {
        match self {
            BasisFunction::Trig { freq, phase } => {
                let a = phase_arg(freq, x);
                let d = match phase {
                    Phase::Cos => -a.sin(),
                    Phase::Sin => a.cos(),
                };
                for (o, &k) in out.iter_mut().zip(freq) {
                    *o = d * T::lit(k as f64);
                }
            }
            BasisFunction::Monomial { exps } => {
                for i in 0..exps.len() {
                    out[i] = if exps[i] == 0 {
                        T::zero()
                    } else {
                        let mut p = T::lit(exps[i] as f64) * x[i].powi(exps[i] as i32 - 1);
                        for j in 0..exps.len() {
                            if j != i {
                                p = p * x[j].powi(exps[j] as i32);
                            }
                        }
                        p
                    };
                }
            }
        }
    }

    /// Upper bounds of `|∂_i f|` on the box `center ± half`.
    pub fn gradient_bound<T: Real>(&self, center: &[T], half: &[T], out: &mut [T]) {
        match self {
            BasisFunction::Trig { freq, .. } => {
                for (o, &k) in out.iter_mut().zip(freq) {
                    *o = T::lit((k as f64).abs());
                }
            }
            BasisFunction::Monomial { exps } => {
                let m: Vec<T> = center.iter().zip(half).map(|(&c, &h)| c.abs() + h).collect();
                for i in 0..exps.len() {
                    out[i] = if exps[i] == 0 {
                        T::zero()
                    } else {
                        let mut p = T::lit(exps[i] as f64) * m[i].powi(exps[i] as i32 - 1);
                        for j in 0..exps.len() {
                            if j != i {
                                p = p * m[j].powi(exps[j] as i32);
                            }
                        }
                        p
                    };
                }
            }
        }
    }

    /// `cos <k, x>` and `sin <k, x>` for every frequency; the sine is
    /// omitted for `k = 0`.
    pub fn trig_family(frequencies: &[Vec<i32>]) -> Vec<Self> {
        let mut out = Vec::new();
        for k in frequencies {
            out.push(BasisFunction::Trig { freq: k.clone(), phase: Phase::Cos });
            if k.iter().any(|&v| v != 0) {
                out.push(BasisFunction::Trig { freq: k.clone(), phase: Phase::Sin });
            }
        }
        out
    }

    pub fn monomial_family(degrees: &[Vec<u32>]) -> Vec<Self> {
        degrees.iter().map(|e| BasisFunction::Monomial { exps: e.clone() }).collect()
    }
}

fn phase_arg<T: Real>(freq: &[i32], x: &[T]) -> T {
    freq.iter().zip(x).fold(T::zero(), |s, (&k, &v)| s + T::lit(k as f64) * v)
}
