import numpy as np
import pytest

from src.zsvr.v1.entities.zsvr_batch_plan import ZsvrBatchPlan
from src.zsvr.v1.entities.zsvr_frame_sequence import ZsvrFrameSequence
from src.zsvr.v1.entities.zsvr_restore_config import ZsvrRestoreConfig
from src.zsvr.v1.zsvr_errors import *
from src.zsvr.v1.zsvr_manager import (ZsvrManager, format_table, measure, plan_batches, precompute_flows,
                                      sampler_steps, stage_bounds)
from src.zsvr.v1.zsvr_synthetic import degrade, synthesize_video


def _video(frames: int = 12, size: int = 16, seed: int = 0) -> tuple:
    hq = synthesize_video(num_frames=frames, size=size, seed=seed)
    return hq, degrade(hq, scale=4, noise_sigma=0.05, seed=seed)


def _config(**overrides) -> ZsvrRestoreConfig:
    values = dict(steps=4, batch_size=4, denoiser_channels=8, flow_block=3, flow_search=2)
    values.update(overrides)
    return ZsvrRestoreConfig(**values)


def _off(**overrides) -> ZsvrRestoreConfig:
    return _config(hlw_until=0.0, tome_range_beg=0, tome_range_end=0, **overrides)


def test_zsvr_plan_batches_layout():
    plan = plan_batches(10, 4, seed=1)

    assert isinstance(plan, ZsvrBatchPlan)
    assert plan.batches == [(0, 4), (4, 8), (8, 10)]
    assert plan.num_batches == 3
    for b, keyframe in enumerate(plan.keyframe_of):
        assert keyframe in plan.members(b)
        assert plan.batch_of(keyframe) == b
    assert plan_batches(10, 4, seed=1).keyframe_of == plan.keyframe_of


def test_zsvr_plan_batches_edge_cases():
    single = plan_batches(5, 1, seed=0)
    assert single.keyframe_of == [0, 1, 2, 3, 4]

    whole = plan_batches(3, 8, seed=0)
    assert whole.batches == [(0, 3)]

    with pytest.raises(ZsvrConfigurationError):
        plan_batches(0, 4, seed=0)
    with pytest.raises(ZsvrConfigurationError):
        plan_batches(4, 0, seed=0)


def test_zsvr_plan_batches_every_position_can_be_keyframe():
    seen = set()
    for seed in range(200):
        keyframe = plan_batches(4, 4, seed=seed).keyframe_of[0]
        seen.add(keyframe)
    assert seen == {0, 1, 2, 3}


def test_zsvr_plan_batches_keyframes_are_uniform():
    counts = np.zeros(4)
    for seed in range(10000):
        counts[plan_batches(4, 4, seed=seed).keyframe_of[0]] += 1

    chi_square = np.sum((counts - 2500.0) ** 2 / 2500.0)
    # 3 degrees of freedom, p = 0.01
    assert chi_square < 11.345


def test_zsvr_sampler_steps_count_distinct_timesteps():
    assert sampler_steps(_config()) == 4
    # t_start = 2 leaves only three distinct strided timesteps
    assert sampler_steps(_config(strength=0.002, steps=4)) == 3


def test_zsvr_stage_bounds():
    assert stage_bounds("none", 50) == (0, 0)
    assert stage_bounds("E", 50) == (0, 17)
    assert stage_bounds("EM", 50) == (0, 33)
    assert stage_bounds("EML", 50) == (0, 50)
    assert stage_bounds("M", 50) == (17, 33)
    assert stage_bounds("L", 50) == (33, 50)
    with pytest.raises(ZsvrConfigurationError):
        stage_bounds("EL", 50)


def test_zsvr_precompute_flows_pairs():
    _, lq = _video(frames=6)
    config = _config(batch_size=3)
    plan = plan_batches(6, 3, seed=0)

    bank = precompute_flows(lq, plan, config)

    k0, k1 = plan.keyframe_of
    assert bank.has_pair(k1, k0)
    for member in range(6):
        keyframe = plan.keyframe_of[plan.batch_of(member)]
        if member != keyframe:
            assert bank.has_pair(member, keyframe)
    for t in range(1, 6):
        assert bank.has_pair(t, t - 1)
    for t in range(1, 5):
        assert bank.has_pair(t + 1, t - 1)
        assert bank.has_pair(t - 1, t + 1)


def test_zsvr_restore_output_shape_and_record():
    _, lq = _video()
    manager = ZsvrManager()

    restored = manager.restore(lq, _config(), name="run")

    assert isinstance(restored, ZsvrFrameSequence)
    assert restored.frames.shape == lq.frames.shape
    assert np.all((restored.frames >= 0.0) & (restored.frames <= 1.0))
    run = manager.runs[-1]
    assert run.name == "run"
    assert [g.frame_index for g in run.latents] == list(range(12))
    assert run.latents[0].data.shape == (4, 4, 3)
    assert run.metadata['steps'] == 4
    assert run.metadata['t_start'] == 599


def test_zsvr_all_off_is_batch_size_invariant():
    _, lq = _video()
    manager = ZsvrManager()

    wide = manager.restore(lq, _off(batch_size=8))
    narrow = manager.restore(lq, _off(batch_size=1))

    assert np.array_equal(wide.frames, narrow.frames)
    assert manager.runs[0].latent_hook_calls == 0
    assert manager.runs[0].attention_hook_calls == 0


def test_zsvr_zero_merge_ratio_is_neutral():
    _, lq = _video()
    manager = ZsvrManager()

    plain = manager.restore(lq, _off(batch_size=4))
    merged = manager.restore(lq, _config(batch_size=4, hlw_until=0.0, tome_r=0.0))

    assert np.array_equal(plain.frames, merged.frames)
    assert manager.runs[1].attention_hook_calls > 0


def test_zsvr_hook_counters_follow_schedule():
    _, lq = _video(frames=8)
    manager = ZsvrManager()

    manager.restore(lq, _config(hlw_until=0.0))
    manager.restore(lq, _config(hlw_until=0.5, tome_range_beg=0, tome_range_end=0))

    no_warp, no_merge = manager.runs
    assert no_warp.latent_hook_calls == 0
    assert no_warp.attention_hook_calls == 2 * 4 * 4
    # steps 0 and 1 of 4, two batches
    assert no_merge.latent_hook_calls == 2 * 2
    assert no_merge.attention_hook_calls == 0


def test_zsvr_restore_is_deterministic():
    _, lq = _video()
    config = _config(hlw_until=0.5)

    first = ZsvrManager().restore(lq, config)
    second = ZsvrManager().restore(lq, config)

    assert np.array_equal(first.frames, second.frames)


def test_zsvr_seed_changes_output():
    _, lq = _video()
    first = ZsvrManager().restore(lq, _off(seed=0))
    second = ZsvrManager().restore(lq, _off(seed=1))
    assert not np.array_equal(first.frames, second.frames)


def test_zsvr_unchained_batches_are_order_independent():
    _, lq = _video()
    config = _config(batch_size=6, hlw_until=0.5, hlw_chain=False)
    manager = ZsvrManager()

    forward = manager.restore(lq, config, batch_order=[0, 1])
    backward = manager.restore(lq, config, batch_order=[1, 0])

    assert np.array_equal(forward.frames, backward.frames)


def test_zsvr_chained_batches_need_order():
    _, lq = _video()
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().restore(lq, _config(batch_size=6, hlw_until=0.5), batch_order=[1, 0])
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().restore(lq, _config(batch_size=6), batch_order=[0, 0])


def test_zsvr_restore_validation():
    _, lq = _video()
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().restore(lq, _config(latent_scale=3))
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().restore(lq, _config(steps=20, strength=0.01))
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().restore(lq, _config(tome_r=1.5))
    with pytest.raises(TypeError):
        ZsvrManager().restore(lq.frames, _config())


def test_zsvr_single_frame_restore():
    _, lq = _video(frames=1)
    restored = ZsvrManager().restore(lq, _config(hlw_until=1.0))
    assert restored.num_frames == 1


def test_zsvr_full_latent_warping_copies_keyframe_on_static_video():
    frame = synthesize_video(num_frames=1, size=16, seed=3)[0]
    static = ZsvrFrameSequence([frame] * 4)
    manager = ZsvrManager()

    restored = manager.restore(static, _config(batch_size=4, hlw_until=1.0, tome_range_beg=0, tome_range_end=0))

    latents = manager.runs[-1].latents
    for latent in latents[1:]:
        assert np.allclose(latent.data, latents[0].data, atol=1e-12)
    for t in range(1, 4):
        assert np.allclose(restored[t], restored[0], atol=1e-12)


def test_zsvr_measure_static_sequence():
    frame = synthesize_video(num_frames=1, size=16, seed=2)[0]
    static = ZsvrFrameSequence([frame] * 5)
    bank = precompute_flows(static, plan_batches(5, 1, 0), _config())

    report = measure(static, bank, static)

    assert report.e_warp == [0.0] * 4
    assert report.e_inter == [0.0] * 3
    assert report.psnr_mean == float('inf')


def test_zsvr_ablate_rows():
    hq, lq = _video(frames=8)
    rows = ZsvrManager().ablate(lq, _config(), variants=["Flow/Flow", "none/none"], reference=hq)

    assert [row['variant'] for row in rows] == ["Flow/Flow", "none/none"]
    assert [row['group'] for row in rows] == ["correspondence", "stages"]
    for row in rows:
        assert set(row) == {'group', 'variant', 'e_warp', 'e_warp_x1e3', 'e_inter', 'psnr', 'ssim'}
        assert row['e_warp_x1e3'] == pytest.approx(row['e_warp'] * 1e3)
        assert row['e_inter'] >= 0.0

    table = format_table(rows)
    assert table.splitlines()[0].split() == ['group', 'variant', 'e_warp_x1e3', 'e_inter', 'psnr', 'ssim']
    assert len(table.splitlines()) == 3


def test_zsvr_ablate_unknown_variant():
    _, lq = _video(frames=4)
    with pytest.raises(ZsvrConfigurationError):
        ZsvrManager().ablate(lq, _config(), variants=["Nope"])


def test_zsvr_latent_warping_improves_consistency():
    baseline_warp, ours_warp, baseline_inter, ours_inter = [], [], [], []
    for seed in range(5):
        _, lq = _video(frames=24, size=24, seed=seed)
        base = _config(seed=seed, batch_size=8)
        bank = precompute_flows(lq, plan_batches(24, 8, seed), base)
        manager = ZsvrManager()
        plain = manager.restore(lq, base.replace(hlw_until=0.0, tome_range_beg=0, tome_range_end=0), bank=bank)
        warped = manager.restore(lq, base.replace(hlw_until=1.0), bank=bank)
        plain_report = measure(plain, bank)
        warped_report = measure(warped, bank)
        baseline_warp.append(plain_report.e_warp_mean)
        ours_warp.append(warped_report.e_warp_mean)
        baseline_inter.append(plain_report.e_inter_mean)
        ours_inter.append(warped_report.e_inter_mean)

    assert np.median(ours_warp) < np.median(baseline_warp)
    assert np.median(ours_inter) < np.median(baseline_inter)


def test_zsvr_merging_alone_moves_consistency_metrics():
    _, lq = _video(frames=8, size=16)
    base = _config()
    bank = precompute_flows(lq, plan_batches(8, base.batch_size, base.seed), base)
    manager = ZsvrManager()

    plain = manager.restore(lq, _off(), bank=bank)
    merged = manager.restore(lq, _config(hlw_until=0.0), bank=bank)

    assert manager.runs[1].latent_hook_calls == 0
    assert np.max(np.abs(merged.frames - plain.frames)) > 1e-3
    plain_report = measure(plain, bank)
    merged_report = measure(merged, bank)
    warp_shift = abs(merged_report.e_warp_mean - plain_report.e_warp_mean) / plain_report.e_warp_mean
    inter_shift = abs(merged_report.e_inter_mean - plain_report.e_inter_mean) / plain_report.e_inter_mean
    assert max(warp_shift, inter_shift) > 1e-3


def test_zsvr_keeping_padding_tokens_changes_merging():
    _, lq = _video(frames=8)
    manager = ZsvrManager()

    # 4x4 latents are padded to 8x8 tokens
    stripped = manager.restore(lq, _config(hlw_until=0.0))
    kept = manager.restore(lq, _config(hlw_until=0.0, tome_strip_padding=False))

    assert not np.array_equal(stripped.frames, kept.frames)
    assert np.all((kept.frames >= 0.0) & (kept.frames <= 1.0))
