"""Monte-Carlo calibration for GMRF estimator tolerance bands."""
import numpy as np
from texclass import gmrf


def random_stable_params(rng):
    while True:
        alpha = rng.uniform(-0.12, 0.12, 6)
        sigma2 = rng.uniform(4.0, 50.0)
        try:
            gmrf._check_stability(alpha, 64)
        except gmrf.UnstableParamsError:
            continue
        return gmrf.GmrfParams(alpha, sigma2)


def main():
    rng = np.random.default_rng(42)
    worst_alpha = 0.0
    worst_sigma = 0.0
    for k in range(30):
        params = random_stable_params(rng)
        img = gmrf.synthesize_gmrf(params, 64, seed=1000 + k)
        est = gmrf.estimate_gmrf(img)
        alpha_err = np.max(np.abs(est.alpha - params.alpha))
        sigma_rel = abs(est.sigma2 - params.sigma2) / params.sigma2
        worst_alpha = max(worst_alpha, alpha_err)
        worst_sigma = max(worst_sigma, sigma_rel)
        print(f"set {k:2d}: max|dalpha|={alpha_err:.4f}  rel dsigma2={sigma_rel:.4f}")
    print(f"\nworst alpha error: {worst_alpha:.4f} (tolerance 0.1)")
    print(f"worst sigma2 rel error: {worst_sigma:.4f} (tolerance 0.25)")

    # white-noise band: i.i.d. uniform 32x32, alpha should be near 0
    worst = 0.0
    for seed in range(120):
        r = np.random.default_rng(seed)
        seg = r.integers(0, 256, (32, 32)).astype(np.uint8)
        est = gmrf.estimate_gmrf(seg)
        worst = max(worst, np.max(np.abs(est.alpha)))
    print(f"white-noise worst |alpha| over 120 seeds: {worst:.4f} (band 0.15)")

    # consistency: MAE shrinks from 64 to 128, averaged over 20 seeds
    params = gmrf.GmrfParams(np.array([0.2, 0.2, -0.05, -0.05, 0.05, 0.05]), 4.0)
    mae = {}
    for size in (64, 128):
        errs = []
        for seed in range(20):
            img = gmrf.synthesize_gmrf(params, size, seed=seed)
            est = gmrf.estimate_gmrf(img)
            errs.append(np.mean(np.abs(est.alpha - params.alpha)))
        mae[size] = np.mean(errs)
    print(f"consistency MAE: 64 -> {mae[64]:.4f}, 128 -> {mae[128]:.4f}")

    # synthesizer autocorrelation checks
    noise = gmrf.synthesize_gmrf(gmrf.GmrfParams(np.zeros(6), 1.0), 64, seed=3)
    x = noise.astype(float) - noise.mean()
    lag1 = np.mean(x[:, :-1] * x[:, 1:]) / np.mean(x * x)
    print(f"white noise lag-1 autocorr: {lag1:.4f} (band +-0.05)")


if __name__ == "__main__":
    main()
