// Licensed under the Apache-2.0 license

//! One simulator instance: the event loop, the memory system, every
//! peripheral model, and the secure-element core's timed actions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bench::PhaseLabel;
use crate::bootflow::flash_ctrl::FlashCtrl;
use crate::bootflow::BootManager;
use crate::crypto::{AesEngine, HmacEngine};
use crate::dma::Dma;
use crate::engine::{Fired, Scheduler, SimTime};
use crate::mailbox::Mailbox;
use crate::memsys::{AccessOp, ArchVariant, Master, MemoryMap, MemorySystem};
use crate::SimError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    CoreResume,
    HmacCompressDone,
    AesBlockDone,
    DmaDone,
    DoorbellToRot,
    DoorbellToHost,
}

/// What the core was doing during a span of cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Activity {
    Phase(PhaseLabel),
    Mailbox,
    Boot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub activity: Activity,
    pub start: SimTime,
    pub end: SimTime,
}

/// Maskable interrupt line into a PLIC.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IrqLine {
    pub enabled: bool,
    pub pending: bool,
}

#[derive(Clone, Debug)]
pub struct SocConfig {
    pub variant: ArchVariant,
    pub map: MemoryMap,
    /// Branch/loop bookkeeping charged per word moved and per poll.
    pub loop_overhead: u64,
    pub event_ceiling: u64,
    pub trace: bool,
}

impl SocConfig {
    pub fn new(variant: ArchVariant) -> Self {
        SocConfig {
            variant,
            map: MemoryMap::default(),
            loop_overhead: 1,
            event_ceiling: crate::engine::DEFAULT_EVENT_CEILING,
            trace: false,
        }
    }
}

#[derive(Debug)]
pub struct Soc {
    pub sched: Scheduler<Event>,
    pub mem: MemorySystem,
    pub hmac: HmacEngine,
    pub aes: AesEngine,
    pub dma: Dma,
    pub mailbox: Mailbox,
    pub flash_ctrl: FlashCtrl,
    pub boot_mgr: BootManager,
    pub rot_irq: IrqLine,
    pub host_irq: IrqLine,
    loop_overhead: u64,
    spans: Vec<Span>,
    deferred_error: Option<SimError>,
    in_service: bool,
}

impl Soc {
    pub fn new(config: SocConfig) -> Self {
        let mut sched = Scheduler::new().with_ceiling(config.event_ceiling);
        if config.trace {
            sched = sched.with_trace();
        }
        Soc {
            sched,
            dma: Dma::new(config.variant.has_dma()),
            mem: MemorySystem::new(config.variant, config.map),
            hmac: HmacEngine::new(),
            aes: AesEngine::new(),
            mailbox: Mailbox::new(),
            flash_ctrl: FlashCtrl::new(),
            boot_mgr: BootManager::default(),
            rot_irq: IrqLine::default(),
            host_irq: IrqLine::default(),
            loop_overhead: config.loop_overhead,
            spans: Vec::new(),
            deferred_error: None,
            in_service: false,
        }
    }

    pub fn variant(&self) -> ArchVariant {
        self.mem.variant()
    }

    pub fn now(&self) -> SimTime {
        self.sched.now()
    }

    pub fn loop_overhead(&self) -> u64 {
        self.loop_overhead
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn clear_spans(&mut self) {
        self.spans.clear();
    }

    /// Cycles per activity over the recorded spans.
    pub fn activity_cycles(&self) -> BTreeMap<Activity, u64> {
        let mut out = BTreeMap::new();
        for s in &self.spans {
            *out.entry(s.activity).or_insert(0) += s.end.saturating_sub(s.start);
        }
        out
    }

    /// Keep the core busy for `cycles`, servicing every event that falls due
    /// in the meantime.
    pub fn step(&mut self, activity: Activity, cycles: u64) -> Result<(), SimError> {
        if cycles == 0 {
            return Ok(());
        }
        let start = self.now();
        let resume = self.sched.schedule(cycles, Event::CoreResume);
        loop {
            let fired = self.sched.pop()?.ok_or(SimError::Deadlock("core resume lost"))?;
            if fired.seq == resume.seq() {
                break;
            }
            self.dispatch(fired)?;
        }
        self.record(activity, start, self.now());
        Ok(())
    }

    fn record(&mut self, activity: Activity, start: SimTime, end: SimTime) {
        if let Some(last) = self.spans.last_mut() {
            if last.activity == activity && last.end == start {
                last.end = end;
                return;
            }
        }
        self.spans.push(Span { activity, start, end });
    }

    /// Timed core load.
    pub fn load(&mut self, activity: Activity, addr: u64, width: u8) -> Result<u32, SimError> {
        let a = self.mem.access(Master::Core, addr, AccessOp::Read, width)?;
        self.step(activity, a.cycles)?;
        Ok(a.data)
    }

    /// Timed core store.
    pub fn store(&mut self, activity: Activity, addr: u64, value: u32, width: u8) -> Result<(), SimError> {
        let a = self.mem.access(Master::Core, addr, AccessOp::Write(value), width)?;
        self.step(activity, a.cycles)
    }

    /// One access to an internal peripheral register.
    pub fn reg_access(&mut self, activity: Activity) -> Result<(), SimError> {
        let c = self.mem.latency().peripheral();
        self.step(activity, c)
    }

    /// One access to a host-domain register through the bridge.
    pub fn bridge_reg_access(&mut self, activity: Activity) -> Result<(), SimError> {
        let c = self.mem.latency().ibex_l3;
        self.step(activity, c)
    }

    pub fn overhead(&mut self, activity: Activity, cycles: u64) -> Result<(), SimError> {
        self.step(activity, cycles)
    }

    pub fn loop_tick(&mut self, activity: Activity) -> Result<(), SimError> {
        self.step(activity, self.loop_overhead)
    }

    /// Read a status register until `ready` holds. At least one read.
    pub fn poll(&mut self, activity: Activity, ready: impl Fn(&Soc) -> bool) -> Result<u64, SimError> {
        let mut polls = 0;
        loop {
            self.reg_access(activity)?;
            self.loop_tick(activity)?;
            polls += 1;
            if ready(self) {
                return Ok(polls);
            }
            if self.sched.is_idle() {
                return Err(SimError::Deadlock("polled condition can never become true"));
            }
        }
    }

    pub fn schedule_engine(&mut self, at: Option<SimTime>, event: Event) {
        if let Some(t) = at {
            self.sched.schedule_at(t, event);
        }
    }

    /// Execute one fired event.
    pub fn dispatch(&mut self, fired: Fired<Event>) -> Result<(), SimError> {
        let now = fired.fire_at;
        match fired.action {
            Event::CoreResume => {}
            Event::HmacCompressDone => {
                let next = self.hmac.on_compress_done(now);
                self.schedule_engine(next, Event::HmacCompressDone);
            }
            Event::AesBlockDone => {
                let next = self.aes.on_block_done(now);
                self.schedule_engine(next, Event::AesBlockDone);
            }
            Event::DmaDone => {
                self.dma.on_done(&mut self.mem)?;
            }
            Event::DoorbellToRot => {
                self.rot_irq.pending = true;
                self.mailbox.note_rot_edge();
                self.maybe_service()?;
            }
            Event::DoorbellToHost => {
                self.host_irq.pending = true;
                self.mailbox.note_host_edge();
            }
        }
        Ok(())
    }

    /// Unmask the mailbox interrupt on the secure-element side. A doorbell
    /// that arrived while masked is serviced now.
    pub fn enable_rot_irq(&mut self) -> Result<(), SimError> {
        self.rot_irq.enabled = true;
        self.maybe_service()
    }

    fn maybe_service(&mut self) -> Result<(), SimError> {
        if self.rot_irq.enabled && self.rot_irq.pending && !self.in_service {
            self.rot_irq.pending = false;
            self.in_service = true;
            let r = self.rot_serve();
            self.in_service = false;
            r?;
        }
        Ok(())
    }

    /// Drain the event queue. Returns the time of the last event.
    pub fn run_until_idle(&mut self) -> Result<SimTime, SimError> {
        while let Some(f) = self.sched.pop()? {
            self.dispatch(f)?;
        }
        if let Some(e) = self.deferred_error.take() {
            return Err(e);
        }
        Ok(self.now())
    }

    /// Process events until `done` holds or nothing is left to run.
    pub fn run_until(&mut self, done: impl Fn(&Soc) -> bool) -> Result<bool, SimError> {
        while !done(self) {
            match self.sched.pop()? {
                Some(f) => self.dispatch(f)?,
                None => return Ok(false),
            }
        }
        Ok(true)
    }
}
