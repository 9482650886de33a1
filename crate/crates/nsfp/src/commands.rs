//! The subcommands, callable without going through the binary.

use std::fs;
use std::path::{Path, PathBuf};

use nsfp_core::besov_lab::{lab_sweep, standard_family, LabReport, TestFunction};
use nsfp_core::diagnostics::{assemble_record, sample_state, Finalized, History, MonitorConfig};
use nsfp_core::integrator::{run_simulation, RunObserver, RunOutput};
use nsfp_core::{DiagnosticsRecord, Error as CoreError, GridSpec2D};
use serde_json::Value;

use crate::checkpoint::{self, CheckpointHeader, HistoryHeader};
use crate::config::{FamilyName, GridSection, RunConfig, DEFAULT_TEMPLATE};
use crate::error::AppError;
use crate::output::{self, CsvSink};

pub fn init_config(path: &Path, force: bool) -> Result<(), AppError> {
    if path.exists() && !force {
        return Err(AppError::Io(format!("{} exists; pass --force to overwrite", path.display())));
    }
    fs::write(path, DEFAULT_TEMPLATE).map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Loads `path`, or the defaults when it is `None`.
pub fn load_config(path: Option<&Path>) -> Result<(RunConfig, Option<PathBuf>), AppError> {
    match path {
        Some(p) => {
            let cfg = RunConfig::load(p)?;
            let base = p.parent().map(|b| if b.as_os_str().is_empty() { Path::new(".") } else { b });
            Ok((cfg, base.map(Path::to_path_buf)))
        }
        None => Ok((RunConfig::default(), None)),
    }
}

fn create_dir(dir: &Path) -> Result<(), AppError> {
    fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("cannot create {}: {e}", dir.display())))
}

pub fn checkpoint_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("ckpt_{index:06}.nsfp"))
}

fn history_of(r: &DiagnosticsRecord) -> HistoryHeader {
    History { y_pq: r.y_pq, z_pq: r.z_pq, balance_residual: r.balance_residual }.into()
}

struct FileObserver<'a> {
    csv: CsvSink,
    ckpt_dir: PathBuf,
    every: usize,
    cfg: &'a RunConfig,
    last_checkpoint: Option<usize>,
}

impl FileObserver<'_> {
    fn checkpoint(&mut self, index: usize, fin: &Finalized) -> Result<(), AppError> {
        let header = header_for(self.cfg, fin);
        checkpoint::write(&checkpoint_path(&self.ckpt_dir, index), &header, &fin.state)?;
        self.last_checkpoint = Some(index);
        Ok(())
    }
}

fn header_for(cfg: &RunConfig, fin: &Finalized) -> CheckpointHeader {
    CheckpointHeader {
        t: fin.state.t,
        nx: cfg.grid.nx,
        nm: cfg.grid.nm,
        dealias_fraction: cfg.grid.dealias_fraction,
        params: cfg.model.clone(),
        history: history_of(&fin.record),
    }
}

impl RunObserver for FileObserver<'_> {
    fn on_record(&mut self, index: usize, fin: &Finalized) -> nsfp_core::Result<()> {
        let res = self.csv.push(&fin.record).and_then(|()| {
            if self.every > 0 && index.is_multiple_of(self.every) {
                self.checkpoint(index, fin)
            } else {
                Ok(())
            }
        });
        res.map_err(|e| CoreError::Observer(e.to_string()))
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub output: RunOutput,
    pub dir: PathBuf,
}

pub fn run(cfg: &RunConfig, base: Option<&Path>) -> Result<RunSummary, AppError> {
    let model = cfg.build_model()?;
    let (grid, circle) = cfg.grid()?;
    let init = nsfp_core::standard_initial_data(grid, circle, &cfg.initial_spec()).map_err(AppError::from_core)?;
    let solver = cfg.solver().map_err(AppError::from_core)?;
    let dir = RunConfig::resolve(base, &cfg.output.dir);
    let ckpt_dir = dir.join("checkpoints");
    create_dir(&ckpt_dir)?;
    let mut obs = FileObserver {
        csv: CsvSink::create(&dir.join("diagnostics.csv"))?,
        ckpt_dir,
        every: cfg.output.checkpoint_every,
        cfg,
        last_checkpoint: None,
    };
    let result = run_simulation(&model, init, &cfg.stepper(), solver, &mut obs);
    let (out, err) = match result {
        Ok(o) => (o, None),
        Err(f) => (f.partial, Some(f.error)),
    };
    if cfg.output.json {
        output::write_records_json(&dir.join("diagnostics.json"), &out.records)?;
    }
    if let Some(e) = err {
        return Err(AppError::from_core(e));
    }
    // The final state always gets a checkpoint.
    if let Some(last) = out.records.last() {
        let index = out.records.len() - 1;
        if obs.last_checkpoint != Some(index) {
            let fin = Finalized { record: *last, state: out.state.clone() };
            obs.checkpoint(index, &fin)?;
        }
    }
    Ok(RunSummary { output: out, dir })
}

pub fn lab_family(cfg: &RunConfig) -> Vec<TestFunction> {
    match cfg.lab.family {
        FamilyName::Standard => standard_family(cfg.lab.seed),
        FamilyName::Modes => cfg.lab.modes.iter().map(|&[k1, k2]| TestFunction::mode(k1, k2, 0.0)).collect(),
    }
}

pub fn verify_inequalities(cfg: &RunConfig, base: Option<&Path>) -> Result<(LabReport, PathBuf), AppError> {
    let grid = GridSpec2D::new(cfg.lab.nx).map_err(AppError::from_core)?;
    let report = lab_sweep(grid, &lab_family(cfg), &cfg.lab.r).map_err(AppError::from_core)?;
    let dir = RunConfig::resolve(base, &cfg.lab.dir);
    create_dir(&dir)?;
    output::write_lab_csv(&dir.join("lab_rows.csv"), &report)?;
    let family = match cfg.lab.family {
        FamilyName::Standard => "standard",
        FamilyName::Modes => "modes",
    };
    output::write_json(&dir.join("lab_summary.json"), &output::lab_summary_json(&report, family, cfg.lab.seed))?;
    Ok((report, dir))
}

/// Recomputes the diagnostics record of a checkpoint.
pub fn diagnose(path: &Path) -> Result<DiagnosticsRecord, AppError> {
    let ck = checkpoint::read(path)?;
    let h = &ck.header;
    let cfg = RunConfig {
        grid: GridSection { nx: h.nx, nm: h.nm, dealias_fraction: h.dealias_fraction },
        model: h.params.clone(),
        ..RunConfig::default()
    };
    let model = cfg.build_model()?;
    let mcfg = MonitorConfig::from_params(model.params()).map_err(AppError::from_core)?;
    let sample = sample_state(&model, &ck.state, &mcfg);
    Ok(assemble_record(&sample, &h.history.into()))
}

pub fn diagnose_json(path: &Path) -> Result<Value, AppError> {
    diagnose(path).map(|r| output::record_json(&r))
}
