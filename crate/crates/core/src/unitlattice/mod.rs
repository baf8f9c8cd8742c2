//! Unit groups, regulators and class numbers of maximal orders, and h*R of sub-orders
//! through the conductor formula.

mod classgroup;
mod context;
mod units;

pub use classgroup::{class_group, minkowski_bound, principal_generator, ClassGroup, ClassGroupConfig};
pub use context::OrderContext;
pub use units::{fundamental_system, UnitSearchConfig};

use crate::arith::intmat;
use crate::exactpoly::ExactPolyError;
use crate::orderfield::{conductor, maximal_order, residue_unit_counts_bruteforce, ConductorData, MaximalOrder, OrderBasis, OrderError};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum UnitError {
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("Minkowski bound {bound:.1} exceeds the cap {cap}")]
    BoundTooLarge { bound: f64, cap: f64 },
    #[error("discriminant {0} above the configured limit")]
    DiscriminantTooLarge(BigInt),
    #[error("unit rank is zero")]
    RankZero,
    #[error(transparent)]
    Poly(#[from] ExactPolyError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitBasis {
    pub rank: usize,
    /// Coordinates over the order basis.
    pub generators: Vec<Vec<BigInt>>,
    /// Rows (ln|rho_i(u)|, 2 ln|sigma_j(u)|).
    pub log_matrix: Vec<Vec<f64>>,
    /// The same rows as fixed-point numerators at `precision_bits`.
    pub log_matrix_fixed: Vec<Vec<BigInt>>,
    pub precision_bits: u32,
}

impl UnitBasis {
    pub fn from_generators(ctx: &OrderContext, generators: Vec<Vec<BigInt>>) -> Self {
        let log_matrix_fixed: Vec<Vec<BigInt>> = generators.iter().map(|u| ctx.log_vector_fixed(u)).collect();
        let bits = ctx.profile.precision_bits;
        let log_matrix = log_matrix_fixed
            .iter()
            .map(|row| row.iter().map(|x| crate::arith::fixed::to_f64(x, bits)).collect())
            .collect();
        UnitBasis { rank: generators.len(), generators, log_matrix, log_matrix_fixed, precision_bits: bits }
    }

    /// |det| of the log matrix with the last column deleted.
    pub fn regulator(&self) -> f64 {
        units::regulator_of(&self.log_matrix)
    }

    /// Per-place ln|sigma| (complex columns halved).
    pub fn place_logs(&self, real_places: usize) -> Vec<Vec<f64>> {
        self.log_matrix
            .iter()
            .map(|row| row.iter().enumerate().map(|(i, x)| if i < real_places { *x } else { x / 2.0 }).collect())
            .collect()
    }
}

/// h, R and their product. For non-maximal orders only the product is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRegulatorData {
    pub h: Option<u64>,
    pub regulator: Option<f64>,
    pub hr: f64,
}

impl ClassRegulatorData {
    pub fn maximal(h: u64, regulator: f64) -> Self {
        ClassRegulatorData { h: Some(h), regulator: Some(regulator), hr: h as f64 * regulator }
    }
}

/// Proven lower bounds for regulators, per signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundFormula {
    /// (1/3) ln((|D| - 24) / 4), complex cubic fields.
    Artin,
    /// (1/16) ln^2(D / 4), totally real cubic fields.
    Cusick,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegulatorBounds {
    pub default_floor: f64,
    pub floors: BTreeMap<(usize, usize), f64>,
    pub formulas: BTreeMap<(usize, usize), BoundFormula>,
}

pub const DEFAULT_BOUNDS: &str = "\
# regulator lower bounds
default.floor = 0.2052
sig.1.1.floor = 0.2052
sig.1.1.formula = artin
sig.3.0.floor = 0.2052
sig.3.0.formula = cusick
";

impl Default for RegulatorBounds {
    fn default() -> Self {
        Self::parse(DEFAULT_BOUNDS).expect("embedded bounds parse")
    }
}

impl RegulatorBounds {
    /// Key-value text: `default.floor = x`, `sig.R.S.floor = x`, `sig.R.S.formula = artin|cusick`;
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut out = RegulatorBounds { default_floor: 0.0, floors: BTreeMap::new(), formulas: BTreeMap::new() };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(format!("line {}: expected key = value", n + 1))?;
            let key = key.trim();
            let value = value.trim();
            let parts: Vec<&str> = key.split('.').collect();
            match parts.as_slice() {
                ["default", "floor"] => out.default_floor = value.parse().map_err(|e| format!("line {}: {e}", n + 1))?,
                ["sig", r, s, what] => {
                    let sig: (usize, usize) = (
                        r.parse().map_err(|e| format!("line {}: {e}", n + 1))?,
                        s.parse().map_err(|e| format!("line {}: {e}", n + 1))?,
                    );
                    match *what {
                        "floor" => {
                            out.floors.insert(sig, value.parse().map_err(|e| format!("line {}: {e}", n + 1))?);
                        }
                        "formula" => {
                            let f = match value {
                                "artin" => BoundFormula::Artin,
                                "cusick" => BoundFormula::Cusick,
                                other => return Err(format!("line {}: unknown formula {other}", n + 1)),
                            };
                            out.formulas.insert(sig, f);
                        }
                        other => return Err(format!("line {}: unknown key {other}", n + 1)),
                    }
                }
                _ => return Err(format!("line {}: unknown key {key}", n + 1)),
            }
        }
        Ok(out)
    }

    pub fn lower_bound(&self, signature: (usize, usize), field_disc: &BigInt) -> f64 {
        let floor = *self.floors.get(&signature).unwrap_or(&self.default_floor);
        let dabs = field_disc.abs().to_f64().unwrap();
        let formula = match (self.formulas.get(&signature), signature) {
            (Some(BoundFormula::Artin), (1, 1)) if dabs > 28.0 => ((dabs - 24.0) / 4.0).ln() / 3.0,
            (Some(BoundFormula::Cusick), (3, 0)) if dabs > 4.0 => (dabs / 4.0).ln().powi(2) / 16.0,
            _ => 0.0,
        };
        floor.max(formula)
    }
}

/// Certified fundamental units of the order in `ctx`.
pub fn fundamental_units(ctx: &OrderContext, lower: f64, cfg: &UnitSearchConfig) -> Result<UnitBasis, UnitError> {
    let gens = fundamental_system(ctx, lower, cfg)?;
    let basis = UnitBasis::from_generators(ctx, gens);
    let reg = basis.regulator();
    if !(reg > lower) {
        return Err(UnitError::CertificationFailed(format!("regulator {reg} not above the proven bound {lower}")));
    }
    Ok(basis)
}

/// h(O_F) for the maximal order in `ctx`.
pub fn class_number(ctx: &OrderContext, field_disc: &BigInt, units: &UnitBasis, cfg: &ClassGroupConfig) -> Result<u64, UnitError> {
    let logs = units.place_logs(ctx.signature().0);
    Ok(class_group(ctx, field_disc, &logs, cfg)?.order)
}

/// h(O) R(O) = h(O_F) R(O_F) |(O_F/f)^x| / |(O/f)^x|.
pub fn hr_for_order(max_data: &ClassRegulatorData, cond: &ConductorData) -> ClassRegulatorData {
    if cond.conductor_index == BigInt::from(1) {
        return max_data.clone();
    }
    ClassRegulatorData { h: None, regulator: None, hr: max_data.hr * cond.unit_ratio() }
}

#[derive(Clone, Debug)]
pub struct InvariantConfig {
    pub disc_cap: BigInt,
    pub bounds: RegulatorBounds,
    pub units: UnitSearchConfig,
    pub class_group: ClassGroupConfig,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        InvariantConfig {
            disc_cap: BigInt::from(10u64.pow(9)),
            bounds: RegulatorBounds::default(),
            units: UnitSearchConfig::default(),
            class_group: ClassGroupConfig::default(),
        }
    }
}

/// Everything computed once per field.
#[derive(Clone, Debug)]
pub struct FieldInvariants {
    pub max: MaximalOrder,
    pub ctx: OrderContext,
    pub units: UnitBasis,
    pub class_group: ClassGroup,
    pub data: ClassRegulatorData,
    pub regulator_lower_bound: f64,
}

impl FieldInvariants {
    pub fn compute(poly: &crate::exactpoly::MonicIntPolynomial, cfg: &InvariantConfig) -> Result<Self, UnitError> {
        let max = maximal_order(poly);
        if max.field_discriminant.abs() > cfg.disc_cap {
            return Err(UnitError::DiscriminantTooLarge(max.field_discriminant.clone()));
        }
        let ctx = OrderContext::new(max.basis.clone())?;
        let lower = cfg.bounds.lower_bound(ctx.signature(), &max.field_discriminant);
        let units = fundamental_units(&ctx, lower, &cfg.units)?;
        let logs = units.place_logs(ctx.signature().0);
        let class_group = class_group(&ctx, &max.field_discriminant, &logs, &cfg.class_group)?;
        let data = ClassRegulatorData::maximal(class_group.order, units.regulator());
        Ok(FieldInvariants { max, ctx, units, class_group, data, regulator_lower_bound: lower })
    }

    pub fn signature(&self) -> (usize, usize) {
        self.ctx.signature()
    }
}

/// h, R of a sub-order computed without the conductor formula: R(O) from a unit search
/// in O itself, [O_F^x : O^x] by enumeration modulo the conductor, and h(O) from the
/// exact sequence 1 -> O_F^x/O^x -> (O_F/f)^x/(O/f)^x -> Pic(O) -> Cl(O_F) -> 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectOrderData {
    pub h: u64,
    pub regulator: f64,
    pub unit_index: u64,
    pub hr: f64,
}

pub fn direct_order_data(order: &OrderBasis, field: &FieldInvariants, cfg: &UnitSearchConfig) -> Result<DirectOrderData, UnitError> {
    let max = &field.max.basis;
    let table = &field.ctx.table;
    let ctx = OrderContext::new(order.clone())?;
    // R(O) = R_F [O_F^x : O^x] >= R_F
    let lower = field.data.regulator.unwrap() * (1.0 - 1e-9);
    let units = fundamental_units(&ctx, lower, cfg)?;
    let regulator = units.regulator();
    let rel = intmat::hnf_lower(&max.relative_matrix(order).expect("sub-order"));
    let f = conductor(order, max, table);
    let inside = |x: &[BigInt]| intmat::in_lattice(&rel, x);
    let reduce = |x: Vec<BigInt>| intmat::reduce_lower(&f, &x);
    // order of each fundamental unit modulo O
    let gens = &field.units.generators;
    let mut orders = Vec::with_capacity(gens.len());
    for g in gens {
        let g = reduce(g.clone());
        let mut acc = g.clone();
        let mut m = 1u64;
        while !inside(&acc) {
            acc = reduce(table.mul(&acc, &g));
            m += 1;
            assert!(m < 1_000_000, "unit order modulo the conductor is bounded by the quotient size");
        }
        orders.push(m);
    }
    // count exponent vectors in the box whose unit lies in O
    let total: u64 = orders.iter().product();
    let mut count = 0u64;
    let mut e = vec![0u64; gens.len()];
    loop {
        let mut x = table.one();
        for (g, &k) in gens.iter().zip(&e) {
            for _ in 0..k {
                x = reduce(table.mul(&x, g));
            }
        }
        if inside(&x) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == e.len() {
                break;
            }
            e[i] += 1;
            if e[i] < orders[i] {
                break;
            }
            e[i] = 0;
            i += 1;
        }
        if i == e.len() {
            break;
        }
    }
    let unit_index = total / count;
    let counts = residue_unit_counts_bruteforce(order, max, crate::orderfield::DEFAULT_CONDUCTOR_CAP)?;
    let quotient = &counts.unit_count_max / &counts.unit_count_sub;
    assert!((&counts.unit_count_max % &counts.unit_count_sub).is_zero());
    let numer = BigInt::from(field.data.h.unwrap()) * quotient;
    assert!((&numer % BigInt::from(unit_index)).is_zero(), "unit index divides the quotient");
    let h = (numer / BigInt::from(unit_index)).to_u64().unwrap();
    Ok(DirectOrderData { h, regulator, unit_index, hr: h as f64 * regulator })
}
