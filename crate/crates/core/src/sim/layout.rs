//! Register layouts: named contiguous qubit fields over a basis index.
//!
//! Qubit `q` of the register is bit `q` of the basis index.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest register the sparse engine can index.
pub const MAX_SPARSE_WIDTH: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// R_Q: query slots (tag and value bits).
    Query,
    /// R_N: oracle ancillas and flag outputs.
    Ancilla,
    /// R_I: the semi-classical flag bit.
    Flag,
    /// R_W: workspace.
    Workspace,
}

/// A contiguous run of qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    pub offset: usize,
    pub width: usize,
}

impl Field {
    pub fn new(offset: usize, width: usize) -> Self {
        Self { offset, width }
    }

    fn mask(self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn get(self, index: u64) -> u64 {
        (index >> self.offset) & self.mask()
    }

    /// Overwrites the field. Fails if `value` does not fit.
    pub fn set(self, index: u64, value: u64) -> Result<u64> {
        if value & !self.mask() != 0 {
            return Err(Error::WidthMismatch {
                expected: self.width,
                actual: 64 - value.leading_zeros() as usize,
            });
        }
        Ok((index & !(self.mask() << self.offset)) | (value << self.offset))
    }

    pub fn qubits(self) -> impl Iterator<Item = usize> {
        self.offset..self.offset + self.width
    }

    pub fn overlaps(self, other: Field) -> bool {
        self.offset < other.offset + other.width && other.offset < self.offset + self.width
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedField {
    pub name: String,
    pub role: Role,
    pub field: Field,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    fields: Vec<NamedField>,
    width: usize,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a field above all existing ones.
    pub fn push(&mut self, name: &str, role: Role, width: usize) -> Result<Field> {
        if self.get(name).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate field {name:?}")));
        }
        if self.width + width > MAX_SPARSE_WIDTH {
            return Err(Error::Resource {
                what: "register width",
                required: self.width + width,
                available: MAX_SPARSE_WIDTH,
            });
        }
        let field = Field::new(self.width, width);
        self.fields.push(NamedField {
            name: name.to_owned(),
            role,
            field,
        });
        self.width += width;
        Ok(field)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, name: &str) -> Option<Field> {
        self.fields.iter().find(|f| f.name == name).map(|f| f.field)
    }

    pub fn field(&self, name: &str) -> Result<Field> {
        self.get(name)
            .ok_or_else(|| Error::InvalidParameter(format!("no field named {name:?}")))
    }

    pub fn fields(&self) -> &[NamedField] {
        &self.fields
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &NamedField> {
        self.fields.iter().filter(move |f| f.role == role)
    }

    /// Checks a width against an engine cap.
    pub fn check_cap(&self, what: &'static str, cap: usize) -> Result<()> {
        if self.width > cap {
            return Err(Error::Resource {
                what,
                required: self.width,
                available: cap,
            });
        }
        Ok(())
    }
}

/// Where the query tag of a slot comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagSource {
    /// The algorithm queries one known tag; no qubits are spent on it.
    Fixed(usize),
    /// The tag is held in a quantum field.
    Field(Field),
}

/// Binds the local registers of one oracle query slot to state fields.
///
/// Missing ancilla fields are treated as constant |0⟩ and must stay zero
/// after the oracle acts. A value field narrower than the oracle domain
/// holds zero-extended values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotBinding {
    pub tag: TagSource,
    pub value: Field,
    /// Output register of the standard (tag 0) query.
    pub out: Option<Field>,
    pub zeta: Option<Field>,
    pub eta: Option<Field>,
    pub xi: Option<Field>,
}

impl SlotBinding {
    pub fn fixed(tag: usize, value: Field) -> Self {
        Self {
            tag: TagSource::Fixed(tag),
            value,
            out: None,
            zeta: None,
            eta: None,
            xi: None,
        }
    }

    pub fn with_out(mut self, out: Field) -> Self {
        self.out = Some(out);
        self
    }

    pub fn with_flags(mut self, zeta: Option<Field>, eta: Option<Field>, xi: Option<Field>) -> Self {
        self.zeta = zeta;
        self.eta = eta;
        self.xi = xi;
        self
    }

    pub fn tag_of(&self, index: u64) -> u64 {
        match self.tag {
            TagSource::Fixed(t) => t as u64,
            TagSource::Field(f) => f.get(index),
        }
    }

    fn fields(&self) -> impl Iterator<Item = Field> + '_ {
        let tag = match self.tag {
            TagSource::Field(f) => Some(f),
            TagSource::Fixed(_) => None,
        };
        [tag, Some(self.value), self.out, self.zeta, self.eta, self.xi]
            .into_iter()
            .flatten()
    }
}

/// Checks that every field of every slot is in range and no two overlap.
pub fn check_bindings(width: usize, slots: &[SlotBinding]) -> Result<()> {
    let all: Vec<Field> = slots.iter().flat_map(|s| s.fields()).collect();
    for (i, a) in all.iter().enumerate() {
        if a.offset + a.width > width {
            return Err(Error::WidthMismatch {
                expected: width,
                actual: a.offset + a.width,
            });
        }
        if all[i + 1..].iter().any(|b| a.overlaps(*b)) {
            return Err(Error::InvalidParameter(format!(
                "slot fields overlap at qubit {}",
                a.offset
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_are_contiguous_and_disjoint() {
        let mut l = RegisterLayout::new();
        let x = l.push("x", Role::Query, 3).unwrap();
        let y = l.push("y", Role::Query, 5).unwrap();
        let z = l.push("zeta", Role::Ancilla, 1).unwrap();
        assert_eq!((x.offset, y.offset, z.offset), (0, 3, 8));
        assert_eq!(l.width(), 9);
        assert!(!x.overlaps(y));
        assert!(l.push("x", Role::Workspace, 1).is_err());
    }

    #[test]
    fn get_and_set_round_trip() {
        let f = Field::new(4, 3);
        let idx = f.set(0b1111_0000_1111, 0b101).unwrap();
        assert_eq!(f.get(idx), 0b101);
        assert_eq!(idx & 0b1111, 0b1111);
        assert!(f.set(0, 8).is_err());
    }

    #[test]
    fn overlapping_bindings_rejected() {
        let a = SlotBinding::fixed(1, Field::new(0, 4));
        let b = SlotBinding::fixed(2, Field::new(3, 4));
        assert!(check_bindings(8, &[a, b]).is_err());
        let c = SlotBinding::fixed(2, Field::new(4, 4));
        check_bindings(8, &[a, c]).unwrap();
        assert!(check_bindings(7, &[a, c]).is_err());
    }
}
