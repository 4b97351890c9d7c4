use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::enumerate::SolutionSet;
use super::system::VinogradovSystem;
use crate::{Error, Result};

/// First line of a serialized solution set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionHeader {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: u32,
    pub p: u32,
    pub v: Vec<i128>,
    pub flags: SolutionFlags,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFlags {
    pub off_diagonal: bool,
}

/// A JSON header line followed by one `k_1,…,k_{2p},l_1,…,l_{2p}` record per line.
pub fn write_solutions<W: Write>(set: &SolutionSet, mut out: W) -> Result<()> {
    let header = SolutionHeader {
        n: set.system.n,
        d: set.system.d,
        p: set.system.p,
        v: set.system.v.clone(),
        flags: SolutionFlags { off_diagonal: set.off_diagonal },
        count: set.len(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    let mut line = String::new();
    for t in set.iter() {
        line.clear();
        for (i, x) in t.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&x.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Read a serialized set, re-verifying every record against the header's system.
pub fn read_solutions<R: BufRead>(input: R) -> Result<SolutionSet> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| Error::Format("missing header line".into()))??;
    let header: SolutionHeader = serde_json::from_str(&first)?;
    let sys = VinogradovSystem::new(header.n, header.d, header.p, header.v)?;
    let width = 2 * sys.width();
    let mut set = SolutionSet::empty(sys, header.flags.off_diagonal);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let tuple = line
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("record {}: {e}", lineno + 1)))?;
        if tuple.len() != width {
            return Err(Error::Format(format!("record {} has {} fields, expected {width}", lineno + 1, tuple.len())));
        }
        set.push(&tuple)?;
    }
    if set.len() != header.count {
        return Err(Error::Format(format!("header announces {} records, found {}", header.count, set.len())));
    }
    Ok(set)
}
