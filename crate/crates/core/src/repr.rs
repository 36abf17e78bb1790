//! Stable textual representations for CSV and report artifacts.
//!
//! Output must be byte-identical across runs, so every representation is a pure function
//! of the value (no hashing, no addresses).

use num_rational::Ratio;

pub trait Repr {
    fn repr(&self) -> String;
}

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
macro_rules! float_repr {
    ($t:ty) => {
        impl Repr for $t {
            fn repr(&self) -> String {
                let a = self.abs();
                if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
                    format!("{self}")
                } else {
                    format!("{self:e}")
                }
            }
        }
    };
}

float_repr!(f64);
float_repr!(f32);

impl Repr for usize {
    fn repr(&self) -> String {
        self.to_string()
    }
}

impl<T: Clone + num_integer::Integer + std::fmt::Display> Repr for Ratio<T> {
    fn repr(&self) -> String {
        format!("{self}")
    }
}

impl<T: Repr> Repr for Vec<T> {
    fn repr(&self) -> String {
        let parts: Vec<String> = self.iter().map(Repr::repr).collect();
        format!("[{}]", parts.join(";"))
    }
}

impl<A: Repr, B: Repr> Repr for (A, B) {
    fn repr(&self) -> String {
        format!("({}|{})", self.0.repr(), self.1.repr())
    }
}
