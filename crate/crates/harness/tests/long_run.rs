//! Full p=16 multiset run, split in two by a checkpoint. About a minute and
//! a half optimized; run with `--ignored`.

use std::io;

use bhr_harness::{verify_all, Checkpoint, Mode, Sinks, VerifyConfig};

#[test]
#[ignore]
fn p16_all_multisets_with_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt_path = dir.path().join("p16.ckpt.json");
    let mut config = VerifyConfig::new(16, Mode::AllMultisets);
    config.checkpoint_path = Some(ckpt_path.clone());
    config.max_items = Some(80_000);

    let first = verify_all(&config, None, Sinks { results: None, log: &mut io::sink() }).unwrap();
    assert!(first.incomplete);
    assert_eq!(first.solved, 80_000);

    let ckpt = Checkpoint::load(&ckpt_path).unwrap();
    assert_eq!(ckpt.next_index, 80_000);
    config.max_items = None;
    let done = verify_all(&config, Some(ckpt), Sinks { results: None, log: &mut io::sink() }).unwrap();
    assert_eq!(done.total, 167_898);
    assert_eq!(done.solved, 167_898);
    assert_eq!(done.exit_code(), 0);
}
