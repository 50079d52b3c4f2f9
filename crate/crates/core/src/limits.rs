//! Size caps for the exact solvers.
//!
//! Every exact routine refuses inputs beyond its cap with
//! [`Error::SizeLimitExceeded`](crate::Error::SizeLimitExceeded). Callers that
//! accept the cost can raise the caps through a custom [`Limits`].

/// Largest support for the bitmask clique search behind `partial_diameter`.
pub const PARTIAL_DIAMETER_CAP: usize = 64;
/// Support size and index count for `multi_partial_diameter` and `diam″`.
pub const MULTI_POINTS_CAP: usize = 14;
pub const MULTI_INDEX_CAP: usize = 5;
/// Support size for `underline_diam`.
pub const UNDERLINE_POINTS_CAP: usize = 20;
/// Support size for the order-cone observable diameters.
pub const OBS_POINTS_CAP: usize = 8;
/// Support size for `obsdiam_doubleprime`, which enumerates weak orders.
pub const OBS_DOUBLEPRIME_CAP: usize = 6;
/// `|supp X| * |supp Y|` for the exact box distance.
pub const BOX_PAIRS_CAP: usize = 12;
/// Support size for `dominates`.
pub const DOMINATES_CAP: usize = 16;
/// Support size for `mm_isomorphic`.
pub const ISOMORPHISM_CAP: usize = 12;
/// Index count for `atom_assignment` and `distinct_atom_matching`.
pub const ASSIGNMENT_CAP: usize = 10;
/// Support size for the exact subset search in `eps_mm_iso_check` (bitmask).
pub const ISO_SUBSET_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Limits {
    pub partial_diameter: usize,
    pub multi_points: usize,
    pub multi_index: usize,
    pub underline_points: usize,
    pub obs_points: usize,
    pub obs_doubleprime: usize,
    pub box_pairs: usize,
    pub dominates: usize,
    pub isomorphism: usize,
    pub assignment: usize,
    pub iso_subset: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            partial_diameter: PARTIAL_DIAMETER_CAP,
            multi_points: MULTI_POINTS_CAP,
            multi_index: MULTI_INDEX_CAP,
            underline_points: UNDERLINE_POINTS_CAP,
            obs_points: OBS_POINTS_CAP,
            obs_doubleprime: OBS_DOUBLEPRIME_CAP,
            box_pairs: BOX_PAIRS_CAP,
            dominates: DOMINATES_CAP,
            isomorphism: ISOMORPHISM_CAP,
            assignment: ASSIGNMENT_CAP,
            iso_subset: ISO_SUBSET_CAP,
        }
    }
}

impl Limits {
    /// Every cap multiplied by `factor`, except the two bitmask caps of 64
    /// which are structural.
    pub fn scaled(factor: usize) -> Self {
        let d = Limits::default();
        Limits {
            partial_diameter: d.partial_diameter,
            multi_points: d.multi_points * factor,
            multi_index: d.multi_index * factor,
            underline_points: d.underline_points * factor,
            obs_points: d.obs_points * factor,
            obs_doubleprime: d.obs_doubleprime * factor,
            box_pairs: d.box_pairs * factor,
            dominates: d.dominates * factor,
            isomorphism: d.isomorphism * factor,
            assignment: d.assignment * factor,
            iso_subset: d.iso_subset,
        }
    }

    pub(crate) fn check(what: &'static str, size: usize, cap: usize) -> crate::Result<()> {
        if size > cap {
            Err(crate::Error::SizeLimitExceeded { what, size, cap })
        } else {
            Ok(())
        }
    }
}
