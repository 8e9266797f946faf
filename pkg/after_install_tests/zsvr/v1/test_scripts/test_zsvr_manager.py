import numpy as np

from zsvr import *


def test_zsvr_manager_1():
    hq = synthesize_video(num_frames=6, size=16, seed=0)
    lq = degrade(hq, scale=4, seed=0)
    config = ZsvrRestoreConfig(steps=3, batch_size=3, denoiser_channels=8, hlw_until=1.0)

    manager = ZsvrManager()
    restored = manager.restore(lq, config)

    assert isinstance(restored, ZsvrFrameSequence)
    assert restored.frames.shape == hq.frames.shape
    assert manager.runs[-1].latent_hook_calls > 0

    bank = precompute_flows(lq, plan_batches(6, 3, 0), config)
    report = measure(restored, bank, hq)
    assert len(report.e_warp) == 5
    assert np.isfinite(report.psnr_mean)


def test_zsvr_manager_2():
    rows = ZsvrManager().ablate(degrade(synthesize_video(num_frames=4, size=16)),
                                ZsvrRestoreConfig(steps=3, batch_size=2, denoiser_channels=8),
                                variants=["Cos/Cos"])
    assert rows[0]['variant'] == "Cos/Cos"
