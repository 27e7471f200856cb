//! JSON encodings of the core values.
//!
//! A quaternion is a 4-array of scalar strings (exact rationals as `p/q`,
//! floats in shortest round-trip decimal); vectors and matrices are nested
//! arrays of those 4-arrays; ball points are n-arrays of quaternions.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::linalg::{HVector, Mat};
use crate::model::BallPoint;
use crate::quaternion::Quaternion;
use crate::scalar::Scalar;

impl<S: Scalar> Serialize for Quaternion<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        for part in self.coords() {
            seq.serialize_element(&part.to_string())?;
        }
        seq.end()
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Quaternion<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts: Vec<String> = Vec::deserialize(deserializer)?;
        if parts.len() != 4 {
            return Err(de::Error::invalid_length(parts.len(), &"a 4-array of scalars"));
        }
        let mut coords = Vec::with_capacity(4);
        for part in &parts {
            coords.push(S::parse(part).map_err(de::Error::custom)?);
        }
        let mut it = coords.into_iter();
        Ok(Quaternion::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        ))
    }
}

impl<S: Scalar> Serialize for HVector<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        self.coords.serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for HVector<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(HVector::new(Vec::deserialize(deserializer)?))
    }
}

/// Matrices encode as row-major nested arrays of quaternions.
impl<S: Scalar> Serialize for Mat<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        let rows: Vec<Vec<&Quaternion<S>>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c)).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Mat<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<Quaternion<S>>> = Vec::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(de::Error::custom("ragged matrix rows"));
        }
        Ok(Mat::from_rows(rows))
    }
}

impl<S: Scalar> Serialize for BallPoint<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        self.coords().serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for BallPoint<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coords: Vec<Quaternion<S>> = Vec::deserialize(deserializer)?;
        BallPoint::new(coords).map_err(de::Error::custom)
    }
}
