use crate::error::HrapError;
use crate::instance::HrapInstance;

/// Largest assignment count `brute_force_best` will enumerate.
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

/// Makespan of a partial schedule; `None` slots are simply not scheduled yet.
///
/// Each event accumulates the task minutes assigned to it plus every arriving hop:
/// an officer visits the distinct events they serve in event order, starting at the
/// depot, and the travel time of each hop is charged to the event being entered.
/// The makespan is the largest event total.
pub fn partial_makespan(
    instance: &HrapInstance,
    assignment: &[Option<usize>],
) -> Result<u64, HrapError> {
    let cfg = &instance.config;
    let (num_officers, num_events, num_tasks) = (cfg.num_officers, cfg.num_events, cfg.num_tasks);
    if assignment.len() != cfg.num_slots() {
        return Err(HrapError::AssignmentLength {
            got: assignment.len(),
            expected: cfg.num_slots(),
        });
    }

    let mut totals = vec![0u64; num_events];
    for (slot, &entry) in assignment.iter().enumerate() {
        if let Some(officer) = entry {
            if officer >= num_officers {
                return Err(HrapError::InvalidAction {
                    officer,
                    num_officers,
                });
            }
            let event = slot / num_tasks;
            let task = slot % num_tasks;
            totals[event] += u64::from(instance.capability[officer][event][task]);
        }
    }

    for officer in 0..num_officers {
        // Transition row 0 is the depot, row e + 1 is event e.
        let mut location = 0usize;
        for event in 0..num_events {
            let serves = (0..num_tasks)
                .any(|task| assignment[event * num_tasks + task] == Some(officer));
            if serves {
                totals[event] += u64::from(instance.transition[location][event + 1]);
                location = event + 1;
            }
        }
    }

    Ok(totals.into_iter().max().unwrap_or(0))
}

/// Makespan of a complete schedule (one officer per slot).
pub fn makespan(instance: &HrapInstance, assignment: &[usize]) -> Result<u64, HrapError> {
    let full: Vec<Option<usize>> = assignment.iter().map(|&o| Some(o)).collect();
    partial_makespan(instance, &full)
}

/// Exhaustively enumerates all `O^(E*T)` schedules and returns the best one.
///
/// Assignments are visited in lexicographic slot order and improvements are strict,
/// so ties resolve to the lexicographically smallest argmin. Instances whose search
/// space exceeds [`BRUTE_FORCE_CAP`] are refused.
pub fn brute_force_best(instance: &HrapInstance) -> Result<(Vec<usize>, u64), HrapError> {
    let cfg = &instance.config;
    let slots = cfg.num_slots();
    let mut size: u128 = 1;
    for _ in 0..slots {
        size = size.saturating_mul(cfg.num_officers as u128);
        if size > BRUTE_FORCE_CAP {
            return Err(HrapError::SearchSpaceTooLarge {
                size,
                cap: BRUTE_FORCE_CAP,
            });
        }
    }

    let mut assignment = vec![0usize; slots];
    let mut best_assignment = assignment.clone();
    let mut best = makespan(instance, &assignment)?;
    // Odometer over base-O digits with slot 0 most significant, i.e. lexicographic order.
    'outer: loop {
        for slot in (0..slots).rev() {
            assignment[slot] += 1;
            if assignment[slot] < cfg.num_officers {
                let value = makespan(instance, &assignment)?;
                if value < best {
                    best = value;
                    best_assignment.copy_from_slice(&assignment);
                }
                continue 'outer;
            }
            assignment[slot] = 0;
        }
        break;
    }
    Ok((best_assignment, best))
}
