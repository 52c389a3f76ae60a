use std::cell::RefCell;

use super::ExecError;

/// A logical thread inside a workgroup step.
///
/// Lanes are only created by [`super::Workgroup::step`]; every write to
/// shared or global memory is tagged with the lane that issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lane {
    id: u32,
    step: u32,
}

impl Lane {
    pub(super) fn new(id: usize, step: u32) -> Self {
        Lane { id: id as u32, step }
    }

    #[inline]
    pub fn id(self) -> usize {
        self.id as usize
    }

    /// The `k` consecutive items owned by this lane.
    #[inline]
    pub fn chunk(self, k: usize) -> std::ops::Range<usize> {
        let start = self.id as usize * k;
        start..start + k
    }
}

/// Barrier context passed to [`Commit::commit`].
#[doc(hidden)]
pub struct CommitCtx {
    pub(super) kernel: &'static str,
    pub(super) workgroup: usize,
    pub(super) step: u32,
    pub(super) validate: bool,
}

/// Anything that holds writes deferred to the next barrier.
pub trait Commit {
    #[doc(hidden)]
    fn commit(&mut self, ctx: &CommitCtx) -> Result<(), ExecError>;
}

struct Pending<T> {
    index: u32,
    lane: u32,
    step: u32,
    value: T,
}

/// Workgroup-shared scratch array.
///
/// Reads during a step see the contents as of the last barrier. Writes are
/// queued and applied when the step that issued them ends, so a step can
/// never observe another lane's write from the same step.
pub struct SharedArray<T: Copy> {
    name: &'static str,
    data: Vec<T>,
    pending: RefCell<Vec<Pending<T>>>,
    owner: Vec<u32>,
}

impl<T: Copy> SharedArray<T> {
    pub(super) fn new(name: &'static str, len: usize, init: T, validate: bool) -> Self {
        SharedArray {
            name,
            data: vec![init; len],
            pending: RefCell::new(Vec::new()),
            owner: if validate { vec![0; len] } else { Vec::new() },
        }
    }

    #[inline]
    pub fn get(&self, index: usize) -> T {
        self.data[index]
    }

    #[inline]
    pub fn set(&self, lane: Lane, index: usize, value: T) {
        self.pending.borrow_mut().push(Pending {
            index: index as u32,
            lane: lane.id,
            step: lane.step,
            value,
        });
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Committed contents. Meant for reading results once the kernel's
    /// steps are done.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn name(&self) -> &'static str {
        self.name
    }
}

impl<T: Copy> Commit for SharedArray<T> {
    fn commit(&mut self, ctx: &CommitCtx) -> Result<(), ExecError> {
        let pending = self.pending.get_mut();
        if ctx.validate {
            let len = self.data.len();
            let mut result = Ok(());
            for p in pending.iter() {
                let i = p.index as usize;
                if p.step != ctx.step {
                    result = Err(ExecError::StrayWrite {
                        kernel: ctx.kernel,
                        workgroup: ctx.workgroup,
                        buffer: self.name,
                        issued: p.step,
                        step: ctx.step,
                    });
                    break;
                }
                if i >= len {
                    result = Err(ExecError::OutOfBounds {
                        kernel: ctx.kernel,
                        workgroup: ctx.workgroup,
                        step: ctx.step,
                        buffer: self.name,
                        location: i,
                        len,
                    });
                    break;
                }
                let prev = self.owner[i];
                if prev != 0 && prev != p.lane + 1 {
                    result = Err(ExecError::SharedConflict {
                        kernel: ctx.kernel,
                        workgroup: ctx.workgroup,
                        step: ctx.step,
                        buffer: self.name,
                        location: i,
                        first: prev as usize - 1,
                        second: p.lane as usize,
                    });
                    break;
                }
                self.owner[i] = p.lane + 1;
            }
            for p in pending.iter() {
                if let Some(o) = self.owner.get_mut(p.index as usize) {
                    *o = 0;
                }
            }
            if result.is_err() {
                pending.clear();
                return result;
            }
        } else {
            debug_assert!(pending.iter().all(|p| p.step == ctx.step));
        }
        for p in pending.drain(..) {
            self.data[p.index as usize] = p.value;
        }
        Ok(())
    }
}

impl<T: Copy> Drop for SharedArray<T> {
    fn drop(&mut self) {
        if !std::thread::panicking() {
            debug_assert!(
                self.pending.get_mut().is_empty(),
                "shared array `{}` dropped with uncommitted writes",
                self.name
            );
        }
    }
}

impl<C: Commit + ?Sized> Commit for &mut C {
    fn commit(&mut self, ctx: &CommitCtx) -> Result<(), ExecError> {
        (**self).commit(ctx)
    }
}

impl Commit for () {
    fn commit(&mut self, _: &CommitCtx) -> Result<(), ExecError> {
        Ok(())
    }
}

macro_rules! commit_tuple {
    ($($name:ident),+) => {
        impl<$($name: Commit),+> Commit for ($($name,)+) {
            #[allow(non_snake_case)]
            fn commit(&mut self, ctx: &CommitCtx) -> Result<(), ExecError> {
                let ($($name,)+) = self;
                $($name.commit(ctx)?;)+
                Ok(())
            }
        }
    };
}

commit_tuple!(A);
commit_tuple!(A, B);
commit_tuple!(A, B, C);
commit_tuple!(A, B, C, D);
commit_tuple!(A, B, C, D, E);
commit_tuple!(A, B, C, D, E, F);

/// Per-lane private state that survives barriers, like GPU registers.
pub struct Registers<R> {
    regs: Vec<R>,
}

impl<R: Clone> Registers<R> {
    pub fn new(lanes: usize, init: R) -> Self {
        Registers {
            regs: vec![init; lanes],
        }
    }
}

impl<R> Registers<R> {
    #[inline]
    pub fn at(&mut self, lane: Lane) -> &mut R {
        &mut self.regs[lane.id()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &R> {
        self.regs.iter()
    }
}

/// Writes to a global buffer issued by one workgroup during a dispatch.
///
/// The log is applied with [`super::Executor::apply`] after the dispatch, in
/// workgroup order.
pub struct GlobalWrites<T> {
    name: &'static str,
    workgroup: usize,
    log: RefCell<Vec<(usize, u32, T)>>,
}

impl<T> GlobalWrites<T> {
    pub fn new(name: &'static str, workgroup: usize) -> Self {
        GlobalWrites {
            name,
            workgroup,
            log: RefCell::new(Vec::new()),
        }
    }

    pub fn with_capacity(name: &'static str, workgroup: usize, cap: usize) -> Self {
        GlobalWrites {
            name,
            workgroup,
            log: RefCell::new(Vec::with_capacity(cap)),
        }
    }

    #[inline]
    pub fn write(&self, lane: Lane, index: usize, value: T) {
        self.log.borrow_mut().push((index, lane.id, value));
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn workgroup(&self) -> usize {
        self.workgroup
    }

    pub(super) fn into_log(self) -> Vec<(usize, u32, T)> {
        self.log.into_inner()
    }
}
