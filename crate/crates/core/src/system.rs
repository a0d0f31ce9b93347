//! Slow-fast vector fields `ε ẋ = f(x,y,z)`, `ẏ = g_y(x,y,z)`, `ż = g_z(x,y,z)`
//! with interval evaluation of the field, its Jacobian and the critical
//! manifold branch `x = h₀(y,z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{DomainError, Interval, IntervalVec3};

/// Rectangular domain of the slow variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain2 {
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl Domain2 {
    pub fn new(y_min: f64, y_max: f64, z_min: f64, z_max: f64) -> Result<Self> {
        let all_finite = [y_min, y_max, z_min, z_max].iter().all(|v| v.is_finite());
        if !all_finite || y_min >= y_max || z_min >= z_max {
            return Err(Error::Config(format!(
                "invalid domain [{y_min}, {y_max}] x [{z_min}, {z_max}]"
            )));
        }
        Ok(Domain2 {
            y_min,
            y_max,
            z_min,
            z_max,
        })
    }

    pub fn y(&self) -> Interval {
        Interval::new(self.y_min, self.y_max).expect("validated domain")
    }

    pub fn z(&self) -> Interval {
        Interval::new(self.z_min, self.z_max).expect("validated domain")
    }

    pub fn diameter(&self) -> f64 {
        (self.y_max - self.y_min).hypot(self.z_max - self.z_min)
    }

    pub fn contains(&self, y: f64, z: f64) -> bool {
        self.y_min <= y && y <= self.y_max && self.z_min <= z && z <= self.z_max
    }
}

/// Interval-evaluable slow-fast system with one fast and two slow variables.
///
/// Implementors supply `f`, `g_y`, `g_z`, their Jacobian, the epsilon value and
/// the critical-manifold branch `h₀`. Everything else has generic defaults
/// built from those pieces; closed forms may override them.
pub trait SlowFastSystem: Sync {
    fn epsilon(&self) -> f64;

    /// `(f, g_y, g_z)` over a box, without the `1/ε` factor.
    fn rhs(&self, b: &IntervalVec3) -> Result<[Interval; 3], DomainError>;

    /// Rows `∇f`, `∇g_y`, `∇g_z`, each as `[∂x, ∂y, ∂z]`.
    fn jacobian(&self, b: &IntervalVec3) -> Result<[[Interval; 3]; 3], DomainError>;

    /// Height of the critical manifold branch over `(y, z)`.
    fn h0(&self, y: Interval, z: Interval) -> Result<Interval>;

    /// Height at a machine point, used to place mesh vertices.
    fn h0_at(&self, y: f64, z: f64) -> Result<f64> {
        Ok(self.h0(Interval::point(y), Interval::point(z))?.mid())
    }

    /// Slow gradient `(∂y h₀, ∂z h₀)`.
    fn h0_partials(&self, y: Interval, z: Interval) -> Result<(Interval, Interval)> {
        h0_partials_generic(self, y, z)
    }

    /// First-order correction of the slow manifold, `h_ε ≈ h₀ + ε h₁`.
    fn h1(&self, y: Interval, z: Interval) -> Result<Interval> {
        h1_generic(self, y, z)
    }

    /// The vector field of the flow, `F = (f/ε, g_y, g_z)`.
    fn eval_field(&self, b: &IntervalVec3) -> Result<IntervalVec3, DomainError> {
        let [f, gy, gz] = self.rhs(b)?;
        let fast = f.checked_div(Interval::point(self.epsilon()))?;
        Ok(IntervalVec3::new(fast, gy, gz))
    }

    /// `G = ∇(F·n)` for a constant normal `n`, i.e. `J_Fᵀ n`.
    fn eval_g(&self, b: &IntervalVec3, n: &IntervalVec3) -> Result<IntervalVec3, DomainError> {
        let [df, dgy, dgz] = self.jacobian(b)?;
        let nx = n.x.checked_div(Interval::point(self.epsilon()))?;
        let col = |k: usize| nx * df[k] + n.y * dgy[k] + n.z * dgz[k];
        Ok(IntervalVec3::new(col(0), col(1), col(2)))
    }

    /// `‖∇h₀‖` at a machine point; drives the vertex spacing.
    fn kappa(&self, y: f64, z: f64) -> f64 {
        match self.h0_partials(Interval::point(y), Interval::point(z)) {
            Ok((hy, hz)) => hy.mid().hypot(hz.mid()),
            Err(_) => f64::INFINITY,
        }
    }

    /// Checks normal hyperbolicity of the branch over the whole domain:
    /// `∂ₓf` evaluated on the box above the domain must exclude zero.
    fn check_domain(&self, dom: &Domain2) -> Result<()> {
        let (y, z) = (dom.y(), dom.z());
        let x = self.h0(y, z)?;
        let [df, _, _] = self.jacobian(&IntervalVec3::new(x, y, z))?;
        if df[0].contains_zero() {
            return Err(Error::Fold {
                context: format!("∂x f = {:?} over the domain", df[0]),
            });
        }
        Ok(())
    }
}

fn fast_partials<S: SlowFastSystem + ?Sized>(
    sys: &S,
    y: Interval,
    z: Interval,
) -> Result<([[Interval; 3]; 3], [Interval; 3])> {
    let x = sys.h0(y, z)?;
    let b = IntervalVec3::new(x, y, z);
    let jac = sys.jacobian(&b)?;
    if jac[0][0].contains_zero() {
        return Err(Error::Fold {
            context: format!("∂x f = {:?} at y = {:?}, z = {:?}", jac[0][0], y, z),
        });
    }
    Ok((jac, sys.rhs(&b)?))
}

/// `∂y h₀ = -∂y f / ∂x f`, `∂z h₀ = -∂z f / ∂x f` on the branch.
pub fn h0_partials_generic<S: SlowFastSystem + ?Sized>(
    sys: &S,
    y: Interval,
    z: Interval,
) -> Result<(Interval, Interval)> {
    let (jac, _) = fast_partials(sys, y, z)?;
    let [fx, fy, fz] = jac[0];
    Ok(((-fy).checked_div(fx)?, (-fz).checked_div(fx)?))
}

/// `h₁ = -(∂y f g_y + ∂z f g_z) / (∂x f)²` evaluated on the branch.
pub fn h1_generic<S: SlowFastSystem + ?Sized>(sys: &S, y: Interval, z: Interval) -> Result<Interval> {
    let (jac, [_, gy, gz]) = fast_partials(sys, y, z)?;
    let [fx, fy, fz] = jac[0];
    let num = fy * gy + fz * gz;
    Ok((-num).checked_div(fx.sqr())?)
}

/// Which sheet `x = ±√y` of the parabolic critical manifold is enclosed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Rescaled parameters `(A, B, C) = (√ε a, ε b, √ε c)`; `μ` is scale free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledParams {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Singular Hopf parameters given either in original or in rescaled form.
///
/// Rescaled parameters are held fixed as ε varies, so the original `a, b, c`
/// change with ε; original parameters are used as given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HopfParameters {
    Original { mu: f64, a: f64, b: f64, c: f64 },
    Rescaled(RescaledParams),
}

impl HopfParameters {
    pub fn at(&self, epsilon: f64, branch: Branch) -> Result<SingularHopf> {
        match *self {
            HopfParameters::Original { mu, a, b, c } => SingularHopf::new(mu, a, b, c, epsilon, branch),
            HopfParameters::Rescaled(p) => SingularHopf::from_rescaled(p, epsilon, branch),
        }
    }
}

/// Singular Hopf normal form in original coordinates:
///
/// ```text
/// ε ẋ = y - x²
///   ẏ = z - x
///   ż = -μ - a x - b y - c z
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularHopf {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    epsilon: f64,
    pub branch: Branch,
}

impl SingularHopf {
    pub fn new(mu: f64, a: f64, b: f64, c: f64, epsilon: f64, branch: Branch) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        if ![mu, a, b, c].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("non-finite system parameter".into()));
        }
        Ok(SingularHopf {
            mu,
            a,
            b,
            c,
            epsilon,
            branch,
        })
    }

    /// Builds the system from the rescaled parameters used by the scale-free form.
    pub fn from_rescaled(p: RescaledParams, epsilon: f64, branch: Branch) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        let s = epsilon.sqrt();
        Self::new(p.mu, p.a / s, p.b / epsilon, p.c / s, epsilon, branch)
    }

    pub fn rescaled(&self) -> RescaledParams {
        let s = self.epsilon.sqrt();
        RescaledParams {
            mu: self.mu,
            a: self.a * s,
            b: self.b * self.epsilon,
            c: self.c * s,
        }
    }

    /// The same parameters at a different epsilon (original coordinates held fixed).
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.mu, self.a, self.b, self.c, epsilon, self.branch)
    }

    fn inv_eps(&self) -> Interval {
        Interval::point(self.epsilon)
            .recip()
            .expect("epsilon > 0 checked at construction")
    }

    fn require_off_fold(&self, y: Interval) -> Result<()> {
        if y.lo() <= 0.0 {
            return Err(Error::Fold {
                context: format!("y = {y:?} reaches the fold at y = 0"),
            });
        }
        Ok(())
    }
}

impl SlowFastSystem for SingularHopf {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn rhs(&self, b: &IntervalVec3) -> Result<[Interval; 3], DomainError> {
        let f = b.y - b.x.sqr();
        let gy = b.z - b.x;
        let gz = -(b.x * self.a + b.y * self.b + b.z * self.c) - self.mu;
        Ok([f, gy, gz])
    }

    fn jacobian(&self, b: &IntervalVec3) -> Result<[[Interval; 3]; 3], DomainError> {
        let p = Interval::point;
        Ok([
            [b.x.scale(-2.0), Interval::ONE, Interval::ZERO],
            [p(-1.0), Interval::ZERO, Interval::ONE],
            [p(-self.a), p(-self.b), p(-self.c)],
        ])
    }

    fn eval_field(&self, b: &IntervalVec3) -> Result<IntervalVec3, DomainError> {
        let [f, gy, gz] = self.rhs(b)?;
        Ok(IntervalVec3::new(f * self.inv_eps(), gy, gz))
    }

    fn eval_g(&self, b: &IntervalVec3, n: &IntervalVec3) -> Result<IntervalVec3, DomainError> {
        let inv = self.inv_eps();
        let gx = (b.x * n.x * inv).scale(-2.0) - n.y - n.z * self.a;
        let gy = n.x * inv - n.z * self.b;
        let gz = n.y - n.z * self.c;
        Ok(IntervalVec3::new(gx, gy, gz))
    }

    fn h0(&self, y: Interval, _z: Interval) -> Result<Interval> {
        let r = y.sqrt()?;
        Ok(match self.branch {
            Branch::Plus => r,
            Branch::Minus => -r,
        })
    }

    fn h0_at(&self, y: f64, _z: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(DomainError::NegativeSqrt { lo: y, hi: y }.into());
        }
        Ok(self.branch.sign() * y.sqrt())
    }

    fn h0_partials(&self, y: Interval, _z: Interval) -> Result<(Interval, Interval)> {
        self.require_off_fold(y)?;
        let d = y.sqrt()?.scale(2.0 * self.branch.sign());
        Ok((d.recip()?, Interval::ZERO))
    }

    /// `(±√y - z) / (4y)`.
    fn h1(&self, y: Interval, z: Interval) -> Result<Interval> {
        self.require_off_fold(y)?;
        let r = y.sqrt()?.scale(self.branch.sign());
        Ok((r - z).checked_div(y.scale(4.0))?)
    }

    fn kappa(&self, y: f64, _z: f64) -> f64 {
        if y > 0.0 {
            0.5 / y.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn check_domain(&self, dom: &Domain2) -> Result<()> {
        if dom.y_min <= 0.0 {
            return Err(Error::Fold {
                context: format!(
                    "the fold y = 0 must be excluded from the domain (y_min = {} must be > 0)",
                    dom.y_min
                ),
            });
        }
        let (y, z) = (dom.y(), dom.z());
        let x = self.h0(y, z)?;
        let [df, _, _] = self.jacobian(&IntervalVec3::new(x, y, z))?;
        if df[0].contains_zero() {
            return Err(Error::Fold {
                context: format!("∂x f = {:?} over the domain", df[0]),
            });
        }
        Ok(())
    }
}

pub type ScalarFn = Box<dyn Fn(&IntervalVec3) -> Result<Interval, DomainError> + Send + Sync>;
pub type GradientFn = Box<dyn Fn(&IntervalVec3) -> Result<[Interval; 3], DomainError> + Send + Sync>;
pub type BranchFn = Box<dyn Fn(Interval, Interval) -> Result<Interval, DomainError> + Send + Sync>;

/// A system assembled from interval-evaluable callables: the three right-hand
/// sides, their gradients and the critical-manifold branch.
pub struct CallableSystem {
    epsilon: f64,
    rhs: [ScalarFn; 3],
    grads: [GradientFn; 3],
    branch: BranchFn,
}

impl CallableSystem {
    pub fn new(epsilon: f64, rhs: [ScalarFn; 3], grads: [GradientFn; 3], branch: BranchFn) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(CallableSystem {
            epsilon,
            rhs,
            grads,
            branch,
        })
    }
}

impl std::fmt::Debug for CallableSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CallableSystem")
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl SlowFastSystem for CallableSystem {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn rhs(&self, b: &IntervalVec3) -> Result<[Interval; 3], DomainError> {
        Ok([(self.rhs[0])(b)?, (self.rhs[1])(b)?, (self.rhs[2])(b)?])
    }

    fn jacobian(&self, b: &IntervalVec3) -> Result<[[Interval; 3]; 3], DomainError> {
        Ok([(self.grads[0])(b)?, (self.grads[1])(b)?, (self.grads[2])(b)?])
    }

    fn h0(&self, y: Interval, z: Interval) -> Result<Interval> {
        Ok((self.branch)(y, z)?)
    }
}
