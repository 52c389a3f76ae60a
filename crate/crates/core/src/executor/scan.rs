use super::{ExecError, SharedArray, Workgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

/// Hillis-Steele scan of `arr[..len]` in place.
///
/// Forward inclusive leaves `arr[i] = x[0] ⊕ … ⊕ x[i]`; reverse inclusive
/// leaves `arr[i] = x[i] ⊕ … ⊕ x[len-1]`. Exclusive variants shift by one
/// and fill the vacated end with `identity`. Takes `⌈lg len⌉` steps, plus one
/// for the exclusive shift. Lanes stride over `len` when it exceeds `w`.
pub fn wg_scan<T: Copy>(
    wg: &mut Workgroup,
    arr: &mut SharedArray<T>,
    len: usize,
    identity: T,
    combine: impl Fn(T, T) -> T,
    dir: Direction,
    inclusive: bool,
) -> Result<(), ExecError> {
    let w = wg.size();
    let mut offset = 1;
    while offset < len {
        wg.step(arr, |lane, arr| {
            for i in (lane.id()..len).step_by(w) {
                match dir {
                    Direction::Forward if i >= offset => {
                        arr.set(lane, i, combine(arr.get(i - offset), arr.get(i)));
                    }
                    Direction::Reverse if i + offset < len => {
                        arr.set(lane, i, combine(arr.get(i), arr.get(i + offset)));
                    }
                    _ => {}
                }
            }
        })?;
        offset <<= 1;
    }
    if !inclusive {
        wg.step(arr, |lane, arr| {
            for i in (lane.id()..len).step_by(w) {
                let v = match dir {
                    Direction::Forward if i > 0 => arr.get(i - 1),
                    Direction::Reverse if i + 1 < len => arr.get(i + 1),
                    _ => identity,
                };
                arr.set(lane, i, v);
            }
        })?;
    }
    Ok(())
}

/// Work-efficient scan of `data` (length `w·k`): every lane folds its own
/// `k` items, the `w` partials get a Hillis-Steele scan in `partials`, and
/// each lane then rescans its items sequentially from its carry-in.
///
/// Each lane does `O(k + lg w)` combines. With `k = 1` this is a plain
/// Hillis-Steele scan.
#[allow(clippy::too_many_arguments)]
pub fn wg_chunked_scan<T: Copy>(
    wg: &mut Workgroup,
    data: &mut SharedArray<T>,
    partials: &mut SharedArray<T>,
    k: usize,
    identity: T,
    combine: impl Fn(T, T) -> T,
    dir: Direction,
    inclusive: bool,
) -> Result<(), ExecError> {
    let w = wg.size();
    debug_assert!(data.len() >= w * k && partials.len() >= w);
    {
        let data = &*data;
        wg.step(partials, |lane, partials| {
            let mut acc = identity;
            for i in lane.chunk(k) {
                acc = combine(acc, data.get(i));
            }
            partials.set(lane, lane.id(), acc);
        })?;
    }
    wg_scan(wg, partials, w, identity, &combine, dir, true)?;
    let partials = &*partials;
    wg.step(data, |lane, data| {
        let t = lane.id();
        match dir {
            Direction::Forward => {
                let mut acc = if t > 0 { partials.get(t - 1) } else { identity };
                for i in lane.chunk(k) {
                    let next = combine(acc, data.get(i));
                    data.set(lane, i, if inclusive { next } else { acc });
                    acc = next;
                }
            }
            Direction::Reverse => {
                let mut acc = if t + 1 < w { partials.get(t + 1) } else { identity };
                for i in lane.chunk(k).rev() {
                    let next = combine(data.get(i), acc);
                    data.set(lane, i, if inclusive { next } else { acc });
                    acc = next;
                }
            }
        }
    })
}
