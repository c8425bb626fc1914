//! Certification of the two-interval horseshoe of the conjugate map and the
//! coding of its invariant set onto the golden-mean shift.
//!
//! Everything here runs in the conjugate coordinate `y`. For `b < 1/2` the
//! construction uses `g` itself; for `b > 1/2` it uses the reflected map
//! `G(y) = -g(-y)` (conjugate to the `b -> 1 - b` member), and the
//! certificate records `orientation = -1`. Landmarks and margins live in that
//! oriented frame; intervals, points and itineraries exposed by [`Horseshoe`]
//! are converted back to the original `y` of `g`.

mod certificate;
mod coding;
mod word;

pub use certificate::{
    certify, certify_chart, landmark_points, min_certified_a, ConjugateChart, HorseshoeCertificate, Landmarks,
    ReplicatorChart, MARGIN_THRESHOLD, MAX_CERTIFIED_SEARCH_A,
};
pub use coding::{
    code_orbit, cylinder_intervals, point_from_itinerary, CylinderInterval, Horseshoe, MAX_CYLINDER_DEPTH,
};
pub use word::{admissible_count, enumerate_admissible_words, is_admissible, ItineraryWord, MAX_WORD_LEN};
