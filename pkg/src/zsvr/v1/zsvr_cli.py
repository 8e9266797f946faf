# Optional, for forward declarations in Python 3.7+
from __future__ import annotations

import argparse
import logging
import os
import sys

from .entities.zsvr_restore_config import ZsvrRestoreConfig, describe_keys
from .enums.zsvr_enums import ZsvrCommandEnum
from .zsvr_errors import ZsvrError
from .zsvr_flow import estimate_flow, fb_confidence
from .zsvr_manager import (CORRESPONDENCE_VARIANTS, STAGE_VARIANTS, ZsvrManager, format_table,
                           measure, plan_batches, precompute_flows)
from .zsvr_mediaio import (read_frames, report_to_dict, write_flo, write_frames, write_json,
                           write_raw_tensor, write_report)
from .zsvr_synthetic import degrade, synthesize_video
from .zsvr_utilities import staged_directory

logger = logging.getLogger("zsvr")

LOG_FORMAT = '[%(asctime)s] - [%(filename)12s:%(lineno)3d] - %(levelname)s - %(message)s'

# preset of the demo's restored run; see DESIGN.md
DEMO_OVERRIDES = {'hlw_until': 1.0}


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    for handler in logger.handlers:
        handler.setLevel(level)


def _load_config(args) -> ZsvrRestoreConfig:
    config = ZsvrRestoreConfig.from_config_file(args.config) if args.config else ZsvrRestoreConfig()
    overrides = {}
    if getattr(args, 'seed', None) is not None:
        overrides['seed'] = args.seed
    if getattr(args, 'steps', None) is not None:
        overrides['steps'] = args.steps
    if getattr(args, 'batch_size', None) is not None:
        overrides['batch_size'] = args.batch_size
    if getattr(args, 'no_hlw', False):
        overrides['hlw_until'] = 0.0
    if getattr(args, 'no_tome', False):
        overrides['tome_range_beg'] = 0
        overrides['tome_range_end'] = 0
    if overrides:
        config = config.replace(**overrides)
    config.validate()
    return config


def cmd_flow(args) -> int:
    seq = read_frames(args.input)
    with staged_directory(args.out) as out:
        for t in range(1, seq.num_frames):
            flow = estimate_flow(seq[t], seq[t - 1], args.block, args.search)
            reverse = estimate_flow(seq[t - 1], seq[t], args.block, args.search)
            stem = f"{t - 1:05d}_{t:05d}"
            write_flo(flow, os.path.join(out, f"flow_{stem}.flo"))
            write_flo(reverse, os.path.join(out, f"back_{stem}.flo"))
            write_raw_tensor(fb_confidence(flow, reverse).data, os.path.join(out, f"conf_{stem}.rtf"))
    logger.info("wrote %d flow pairs to %s", max(seq.num_frames - 1, 0), args.out)
    return 0


def cmd_restore(args) -> int:
    config = _load_config(args)
    seq = read_frames(args.input)
    manager = ZsvrManager()
    restored = manager.restore(seq, config, name="restore", show_progress=args.verbose)
    with staged_directory(args.out) as out:
        write_frames(restored, out)
        if args.dump_latents:
            latent_dir = os.path.join(out, "latents")
            os.makedirs(latent_dir)
            for latent in manager.runs[-1].latents:
                write_raw_tensor(latent.data, os.path.join(latent_dir, f"latent_{latent.frame_index:05d}.rtf"))
    return 0


def cmd_metrics(args) -> int:
    seq = read_frames(args.input)
    reference = read_frames(args.ref) if args.ref else None
    flow_source = read_frames(args.flow_from) if args.flow_from else seq
    config = ZsvrRestoreConfig(flow_block=args.block, flow_search=args.search, flow_tau_occ=args.tau_occ)
    plan = plan_batches(flow_source.num_frames, 1, 0)
    bank = precompute_flows(flow_source, plan, config)
    report = measure(seq, bank, reference, border=args.border,
                     metadata={'input': args.input, 'flow_from': args.flow_from or args.input})
    write_report(report, args.out)
    return 0


def cmd_ablate(args) -> int:
    config = _load_config(args)
    seq = read_frames(args.input)
    reference = read_frames(args.ref) if args.ref else None
    rows = ZsvrManager().ablate(seq, config, variants=args.variants, reference=reference)
    write_json({'config': config.to_dict(), 'rows': rows}, args.out)
    print(format_table(rows))
    return 0


def cmd_demo(args) -> int:
    hq = synthesize_video(num_frames=args.frames, size=args.size, seed=args.seed)
    lq = degrade(hq, scale=args.scale, noise_sigma=args.noise, seed=args.seed)
    base = ZsvrRestoreConfig(seed=args.seed, steps=args.steps, batch_size=args.batch_size)
    baseline_config = base.replace(hlw_until=0.0, tome_range_beg=0, tome_range_end=0)
    ours_config = base.replace(**DEMO_OVERRIDES)

    bank = precompute_flows(lq, plan_batches(lq.num_frames, base.batch_size, base.seed), base)
    manager = ZsvrManager()
    baseline = manager.restore(lq, baseline_config, bank=bank, name="baseline")
    ours = manager.restore(lq, ours_config, bank=bank, name="ours")

    metadata = {'seed': args.seed, 'frames': args.frames, 'size': args.size,
                'scale': args.scale, 'noise': args.noise}
    report = {
        'baseline': report_to_dict(measure(baseline, bank, hq, metadata=dict(metadata, run="baseline"))),
        'ours': report_to_dict(measure(ours, bank, hq, metadata=dict(metadata, run="ours"))),
        'config': ours_config.to_dict(),
    }
    with staged_directory(args.out) as out:
        for label, seq in (("hq", hq), ("lq", lq), ("baseline", baseline), ("ours", ours)):
            write_frames(seq, os.path.join(out, label))
        write_json(report, os.path.join(out, "report.json"))
    return 0


COMMANDS = {
    ZsvrCommandEnum.FLOW: cmd_flow,
    ZsvrCommandEnum.RESTORE: cmd_restore,
    ZsvrCommandEnum.METRICS: cmd_metrics,
    ZsvrCommandEnum.ABLATE: cmd_ablate,
    ZsvrCommandEnum.DEMO: cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zsvr",
        description="Temporally consistent video restoration with a toy latent diffusion model",
        epilog="config keys (key = value):\n" + describe_keys(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False)
    parser.add_argument("--verbose", action="store_true", help="debug logging and progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    flow = sub.add_parser(ZsvrCommandEnum.FLOW.value, help="adjacent-pair flows and confidences")
    flow.add_argument("--in", dest="input", required=True, help="directory of .ppm/.pgm frames")
    flow.add_argument("--out", required=True, help="output directory")
    flow.add_argument("--block", type=int, default=5)
    flow.add_argument("--search", type=int, default=6)

    restore = sub.add_parser(ZsvrCommandEnum.RESTORE.value, help="restore a frame directory")
    restore.add_argument("--in", dest="input", required=True)
    restore.add_argument("--out", required=True)
    restore.add_argument("--config", default=None, help="key = value config file")
    restore.add_argument("--dump-latents", action="store_true", help="write final latents as .rtf")
    restore.add_argument("--no-hlw", action="store_true", help="disable latent warping")
    restore.add_argument("--no-tome", action="store_true", help="disable token merging")
    restore.add_argument("--seed", type=int, default=None)
    restore.add_argument("--steps", type=int, default=None)
    restore.add_argument("--batch-size", type=int, default=None)

    metrics = sub.add_parser(ZsvrCommandEnum.METRICS.value, help="consistency (and quality) metrics")
    metrics.add_argument("--in", dest="input", required=True)
    metrics.add_argument("--ref", default=None, help="reference frames for PSNR/SSIM")
    metrics.add_argument("--out", required=True, help="report JSON file")
    metrics.add_argument("--flow-from", default=None, help="frames to estimate flows on (default: --in)")
    metrics.add_argument("--block", type=int, default=5)
    metrics.add_argument("--search", type=int, default=6)
    metrics.add_argument("--tau-occ", type=float, default=0.368)
    metrics.add_argument("--border", type=int, default=0)

    ablate = sub.add_parser(ZsvrCommandEnum.ABLATE.value, help="correspondence and stage ablation grid")
    ablate.add_argument("--in", dest="input", required=True)
    ablate.add_argument("--out", required=True, help="JSON file")
    ablate.add_argument("--config", default=None)
    ablate.add_argument("--ref", default=None)
    ablate.add_argument("--variants", nargs="+", default=None,
                        choices=list(CORRESPONDENCE_VARIANTS) + list(STAGE_VARIANTS))
    ablate.add_argument("--seed", type=int, default=None)
    ablate.add_argument("--steps", type=int, default=None)
    ablate.add_argument("--batch-size", type=int, default=None)

    demo = sub.add_parser(ZsvrCommandEnum.DEMO.value, help="synthetic end-to-end comparison")
    demo.add_argument("--out", required=True)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--frames", type=int, default=24)
    demo.add_argument("--size", type=int, default=48)
    demo.add_argument("--scale", type=int, default=4)
    demo.add_argument("--noise", type=float, default=0.05)
    demo.add_argument("--steps", type=int, default=20)
    demo.add_argument("--batch-size", type=int, default=8)
    return parser


def main(argv: list = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    command = ZsvrCommandEnum.from_attribute_get_enum(args.command)
    try:
        return COMMANDS[command](args)
    except (ZsvrError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"zsvr {args.command}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
