use super::{PotentialRequest, RequestId};

/// Total strict request order: reveal time, then end of time window, then id.
///
/// Any admissible order must sort by reveal time first; the two tiebreaks
/// make it total and independent of the first-stage solution.
pub fn order_requests(requests: &[PotentialRequest]) -> Vec<RequestId> {
    let mut ids: Vec<RequestId> = requests.iter().map(|r| r.id).collect();
    ids.sort_by_key(|&id| {
        let r = &requests[id];
        (r.reveal, r.tw_end, r.id)
    });
    ids
}
