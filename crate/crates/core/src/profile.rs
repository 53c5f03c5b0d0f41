use serde::{Deserialize, Serialize};

use crate::valuation::PiecewiseConstant;

pub const PROFILE_VERSION: u32 = 1;

/// On-disk profile: `{"version": 1, "agents": [<density>, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub version: u32,
    pub agents: Vec<PiecewiseConstant>,
}

impl ProfileFile {
    pub fn new(agents: Vec<PiecewiseConstant>) -> Self {
        ProfileFile {
            version: PROFILE_VERSION,
            agents,
        }
    }
}
