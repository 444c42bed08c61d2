use crate::error::Result;
use crate::model::{Arrangement, CompatibilityTensor};

/// Sum of scores over every internal boundary, one term per boundary.
pub fn fitness(a: &Arrangement, t: &CompatibilityTensor) -> Result<f64> {
    let mut total = 0.0;
    for adj in a.adjacent_pairs()? {
        total += t.adjacency_score(&adj)? as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{Edge, Placement, PuzzleType, Rotation};

    #[test]
    fn single_boundary() {
        let mut t = CompatibilityTensor::zeros(2, PuzzleType::Type1);
        t.set(0, Edge::Right.index(), 1, 0.625);
        let a = Arrangement::from_order(1, 2, &[0, 1], &[]).unwrap();
        assert_eq!(fitness(&a, &t).unwrap(), 0.625);
    }

    #[test]
    fn all_ones_two_by_two() {
        let mut t = CompatibilityTensor::zeros(4, PuzzleType::Type1);
        t.scores_mut().fill(1.0);
        let a = Arrangement::from_order(2, 2, &[3, 1, 0, 2], &[]).unwrap();
        assert_eq!(fitness(&a, &t).unwrap(), 4.0);
    }

    #[test]
    fn incomplete_rejected() {
        let t = CompatibilityTensor::zeros(2, PuzzleType::Type1);
        let a =
            Arrangement::new(1, 2, vec![Some(Placement::new(0, 0, Rotation::R0)), None]).unwrap();
        assert!(matches!(fitness(&a, &t), Err(Error::IncompleteArrangement)));
    }

    #[test]
    fn rotated_pieces_need_type2_scores() {
        let t = CompatibilityTensor::zeros(2, PuzzleType::Type1);
        let a = Arrangement::from_order(1, 2, &[0, 1], &[Rotation::R90, Rotation::R0]).unwrap();
        assert!(fitness(&a, &t).is_err());
    }
}
