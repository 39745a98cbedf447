//! Hom cardinalities and the multiplicative Euler forms `[A,B]` and `{A,B}`.

use crate::category::{Indec, Level, Obj, Params};
use crate::error::Error;
use crate::scalar::QScalar;

/// Constants defined as brackets between a generator at index 0 and a shift.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Constant {
    /// `[X_0^(k), X_i^(l)]`
    Lambda,
    /// `[X_0^(k), Z_i^(l)]`
    Mu,
    /// `[Z_0^(k), X_i^(l)]`
    Nu,
    /// `[Z_0^(k), Z_i^(l)]`
    Kappa,
    /// `μ^(k+1,k)_{i - δ_{k,r} m + 1}`
    MuPrime,
    /// `ν^(k,k+1)_{i + δ_{k,r} m - 1}`
    NuPrime,
}

impl std::str::FromStr for Constant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "lambda" | "λ" => Constant::Lambda,
            "mu" | "μ" => Constant::Mu,
            "nu" | "ν" => Constant::Nu,
            "kappa" | "κ" => Constant::Kappa,
            "mu'" | "μ′" | "μ'" => Constant::MuPrime,
            "nu'" | "ν′" | "ν'" => Constant::NuPrime,
            _ => return Err(Error::UnknownConstant(s.to_string())),
        })
    }
}

impl Params {
    /// `|Hom(A,B)| = q^{dim}`.
    pub fn hom_card(&self, a: &Obj, b: &Obj) -> QScalar {
        QScalar::q_pow(self.dim_hom(a, b) as i64)
    }

    /// Exponent `e` with `[a,b] = q^e`, i.e. `Σ_n (-1)^n dim Hom(a, Σ^{-n} b)`.
    ///
    /// Every arrow into `c` out of `a` needs `hi(c) >= lo(a) - 1`, and `hi`
    /// of `Σ^{-n} b` is non-increasing in `n`, so the sum stops once the bound
    /// fails. The next `2r` shifts are scanned as a check.
    pub fn bracket_exponent(&self, a: &Indec, b: &Indec) -> i64 {
        let mut e = 0i64;
        let mut n = 0i64;
        let mut c = *b;
        while c.hi() >= a.lo() - 1 {
            let d = self.hom_dim(a, &c) as i64;
            e += if n % 2 == 0 { d } else { -d };
            n += 1;
            c = self.suspend_indec(&c, -1);
        }
        for _ in 0..2 * self.r {
            assert_eq!(self.hom_dim(a, &c), 0, "vanishing bound violated for {a}, {b}");
            c = self.suspend_indec(&c, -1);
        }
        e
    }

    /// `[A,B] = ∏_{n>=0} |Hom(A, Σ^{-n} B)|^{(-1)^n}`.
    pub fn bracket_square(&self, a: &Obj, b: &Obj) -> QScalar {
        QScalar::q_pow(self.bracket_square_exp(a, b))
    }

    pub fn bracket_square_exp(&self, a: &Obj, b: &Obj) -> i64 {
        let mut e = 0;
        for x in a.summands() {
            for y in b.summands() {
                e += self.bracket_exponent(x, y);
            }
        }
        e
    }

    /// `{A,B} = [A,B] / |Hom(A,B)|`.
    pub fn bracket_curly(&self, a: &Obj, b: &Obj) -> QScalar {
        QScalar::q_pow(self.bracket_curly_exp(a, b))
    }

    pub fn bracket_curly_exp(&self, a: &Obj, b: &Obj) -> i64 {
        self.bracket_square_exp(a, b) - self.dim_hom(a, b) as i64
    }

    /// Named constant with index `i` and levels `(k, l)`. For the primed
    /// constants only `k` is used.
    pub fn named_constant(&self, c: Constant, i: i64, k: Level, l: Level) -> QScalar {
        let e = self.shift(k);
        let k1 = self.level_add(k, 1);
        let (a, b) = match c {
            Constant::Lambda => (Indec::x(k, 0, 0), Indec::x(l, i, i)),
            Constant::Mu => (Indec::x(k, 0, 0), Indec::z(l, i)),
            Constant::Nu => (Indec::z(k, 0), Indec::x(l, i, i)),
            Constant::Kappa => (Indec::z(k, 0), Indec::z(l, i)),
            Constant::MuPrime => (Indec::x(k1, 0, 0), Indec::z(k, i - e + 1)),
            Constant::NuPrime => (Indec::z(k, 0), Indec::x(k1, i + e - 1, i + e - 1)),
        };
        QScalar::q_pow(self.bracket_exponent(&a, &b))
    }

    pub fn lambda(&self, i: i64, k: Level, l: Level) -> QScalar {
        self.named_constant(Constant::Lambda, i, k, l)
    }

    pub fn mu(&self, i: i64, k: Level, l: Level) -> QScalar {
        self.named_constant(Constant::Mu, i, k, l)
    }

    pub fn nu(&self, i: i64, k: Level, l: Level) -> QScalar {
        self.named_constant(Constant::Nu, i, k, l)
    }

    pub fn kappa(&self, i: i64, k: Level, l: Level) -> QScalar {
        self.named_constant(Constant::Kappa, i, k, l)
    }

    /// Closed form of `λ_i^(k,k)` as a power of `q`.
    pub fn lambda_closed_form(&self, i: i64) -> QScalar {
        let (r, m) = (self.r as i64, self.m);
        let sign = |e: i64| if e.rem_euclid(2) == 0 { 1 } else { -1 };
        let e1 = if i >= 0 && i % m == 0 { sign((i / m) * r) } else { 0 };
        let e2 = if i + 1 > 0 && (i + 1) % m == 0 { sign(((i + 1) / m) * r - 1) } else { 0 };
        QScalar::q_pow(e1 + e2)
    }
}
