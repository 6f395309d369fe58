import math

import pytest
import torch

from epsr.errors import ConfigurationError, ShapeError
from epsr.train import (EMAState, IdentityAutoencoder, RandomFeatureExtractor,
                        RandomLinearAutoencoder, cosine_lr, ema_update, loss_aesop,
                        loss_fft_l1, loss_gan, loss_l1, loss_ldl, loss_mse,
                        loss_perceptual)


def rand_pair(gen, shape=(1, 3, 8, 8)):
    return (torch.rand(shape, generator=gen, dtype=torch.float64),
            torch.rand(shape, generator=gen, dtype=torch.float64))


class TestPixelLosses:
    def test_zero_at_identity(self):
        gen = torch.Generator().manual_seed(0)
        p, _ = rand_pair(gen)
        assert float(loss_l1(p, p)) == 0.0
        assert float(loss_mse(p, p)) == 0.0

    def test_constant_shift_values(self):
        gen = torch.Generator().manual_seed(1)
        _, t = rand_pair(gen)
        assert float(loss_l1(t + 0.5, t)) == pytest.approx(0.5)
        assert float(loss_mse(t + 0.5, t)) == pytest.approx(0.25)

    def test_matches_elementwise_brute_force(self):
        gen = torch.Generator().manual_seed(2)
        p, t = rand_pair(gen)
        ref_l1 = sum(abs(a - b) for a, b in zip(p.ravel().tolist(), t.ravel().tolist()))
        ref_l1 /= p.numel()
        assert float(loss_l1(p, t)) == pytest.approx(ref_l1, abs=1e-7)
        ref_mse = sum((a - b) ** 2 for a, b in zip(p.ravel().tolist(), t.ravel().tolist()))
        ref_mse /= p.numel()
        assert float(loss_mse(p, t)) == pytest.approx(ref_mse, abs=1e-7)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            loss_l1(torch.zeros(1, 3, 4, 4), torch.zeros(1, 3, 4, 5))


class TestFftL1:
    def test_zero_at_identity(self):
        gen = torch.Generator().manual_seed(3)
        p, _ = rand_pair(gen)
        assert float(loss_fft_l1(p, p)) == 0.0

    def test_constant_shift_hits_dc_bin_only(self):
        gen = torch.Generator().manual_seed(4)
        _, t = rand_pair(gen)
        c = 0.37
        # DFT of a constant c field is c*H*W at DC; stacking real and imaginary
        # parts doubles the element count, so the mean is |c|/2.
        assert float(loss_fft_l1(t + c, t)) == pytest.approx(c / 2, rel=1e-9)

    def test_matches_dft_matrix_brute_force(self):
        gen = torch.Generator().manual_seed(5)
        p, t = rand_pair(gen, (1, 1, 4, 4))
        n = 4
        dft = torch.tensor([[complex(math.cos(-2 * math.pi * i * j / n),
                                     math.sin(-2 * math.pi * i * j / n))
                             for j in range(n)] for i in range(n)],
                           dtype=torch.complex128)
        diff = (p - t)[0, 0].to(torch.complex128)
        spectrum = dft @ diff @ dft.T
        ref = (spectrum.real.abs().sum() + spectrum.imag.abs().sum()) / (2 * n * n)
        assert float(loss_fft_l1(p, t)) == pytest.approx(float(ref), abs=1e-5)


class TestPerceptual:
    def test_zero_at_identity_any_extractor(self):
        gen = torch.Generator().manual_seed(6)
        p, _ = rand_pair(gen)
        ext = RandomFeatureExtractor(seed=0).double()
        assert float(loss_perceptual(p, p, ext)) == 0.0

    def test_identity_extractor_reduces_to_l1(self):
        gen = torch.Generator().manual_seed(7)
        p, t = rand_pair(gen)
        identity = lambda x: [x]
        got = loss_perceptual(p, t, identity, stage_weights=(1.0,))
        assert float(got) == pytest.approx(float(loss_l1(p, t)), rel=1e-12)

    def test_matches_manual_stage_sum(self):
        gen = torch.Generator().manual_seed(8)
        p, t = rand_pair(gen, (1, 3, 16, 16))
        ext = RandomFeatureExtractor(seed=3).double()
        weights = (0.1, 0.1, 1.0, 1.0, 1.0)
        manual = sum(w * float((fp - ft).abs().mean())
                     for w, fp, ft in zip(weights, ext(p), ext(t)))
        assert float(loss_perceptual(p, t, ext)) == pytest.approx(manual, abs=1e-6)


class TestGan:
    def test_generator_at_zero_logits(self):
        logits = torch.zeros(2, 1, 6, 6)
        assert float(loss_gan(None, logits, "generator")) == \
            pytest.approx(math.log(2), rel=1e-6)

    def test_discriminator_saturated(self):
        real = torch.full((1, 1, 4, 4), 20.0)
        fake = torch.full((1, 1, 4, 4), -20.0)
        assert float(loss_gan(real, fake, "discriminator")) == pytest.approx(0.0, abs=1e-6)

    def test_matches_brute_force_formula(self):
        gen = torch.Generator().manual_seed(9)
        real = torch.randn(1, 1, 5, 5, generator=gen, dtype=torch.float64)
        fake = torch.randn(1, 1, 5, 5, generator=gen, dtype=torch.float64)
        ref_d = sum(math.log(1 + math.exp(-v)) for v in real.ravel().tolist())
        ref_d += sum(math.log(1 + math.exp(v)) for v in fake.ravel().tolist())
        ref_d /= real.numel()
        assert float(loss_gan(real, fake, "discriminator")) == pytest.approx(ref_d, abs=1e-6)
        ref_g = sum(math.log(1 + math.exp(-v)) for v in fake.ravel().tolist()) / fake.numel()
        assert float(loss_gan(None, fake, "generator")) == pytest.approx(ref_g, abs=1e-6)

    def test_unknown_side(self):
        with pytest.raises(ConfigurationError):
            loss_gan(None, torch.zeros(1, 1, 2, 2), "critic")


class TestLdl:
    def test_zero_at_identity(self):
        gen = torch.Generator().manual_seed(10)
        p, _ = rand_pair(gen)
        assert float(loss_ldl(p, p)) == 0.0

    def test_constant_residual_gives_uniform_zero_map(self):
        # A constant residual has zero variance everywhere: the artifact map is
        # uniform and (up to the clamp epsilon) zero, so the loss vanishes.
        gen = torch.Generator().manual_seed(11)
        _, t = rand_pair(gen)
        assert float(loss_ldl(t + 0.3, t)) < 1e-12

    def test_nonnegative_on_random_inputs(self):
        gen = torch.Generator().manual_seed(12)
        for _ in range(5):
            p, t = rand_pair(gen)
            assert float(loss_ldl(p, t)) >= 0.0


class TestAesop:
    def test_identity_autoencoder_reduces_to_l1(self):
        gen = torch.Generator().manual_seed(13)
        p, t = rand_pair(gen)
        got = loss_aesop(p, t, IdentityAutoencoder())
        assert float(got) == pytest.approx(float(loss_l1(p, t)), rel=1e-12)

    def test_zero_at_identity_any_autoencoder(self):
        gen = torch.Generator().manual_seed(14)
        p, _ = rand_pair(gen)
        ae = RandomLinearAutoencoder(seed=5).double()
        assert float(loss_aesop(p, p, ae)) == 0.0

    def test_matches_manual_composition(self):
        gen = torch.Generator().manual_seed(15)
        p, t = rand_pair(gen)
        ae = RandomLinearAutoencoder(seed=6).double()
        manual = float((ae(p) - ae(t)).abs().mean())
        assert float(loss_aesop(p, t, ae)) == pytest.approx(manual, abs=1e-6)


class TestGradients:
    """Analytic vs central finite differences, several coordinates per loss."""

    CASES = {
        "l1": lambda p, t: loss_l1(p, t),
        "mse": lambda p, t: loss_mse(p, t),
        "fft_l1": lambda p, t: loss_fft_l1(p, t),
        "perceptual": lambda p, t, ext=RandomFeatureExtractor(seed=21).double():
            loss_perceptual(p, t, ext),
        "ldl": lambda p, t: loss_ldl(p, t),
        "aesop": lambda p, t, ae=RandomLinearAutoencoder(seed=22).double():
            loss_aesop(p, t, ae),
    }

    @pytest.mark.parametrize("name", sorted(CASES))
    def test_finite_difference_agreement(self, name):
        fn = self.CASES[name]
        gen = torch.Generator().manual_seed(30)
        p, t = rand_pair(gen)
        x = p.clone().requires_grad_(True)
        fn(x, t).backward()
        grad = x.grad
        eps = 1e-6
        for index in [(0, 0, 0, 0), (0, 1, 3, 2), (0, 2, 7, 7)]:
            plus = p.clone()
            plus[index] += eps
            minus = p.clone()
            minus[index] -= eps
            numeric = (float(fn(plus, t)) - float(fn(minus, t))) / (2 * eps)
            analytic = float(grad[index])
            assert abs(numeric - analytic) <= 1e-3 * max(abs(numeric), 1e-8), \
                (name, index, numeric, analytic)

    def test_gan_gradient(self):
        gen = torch.Generator().manual_seed(31)
        fake = torch.randn(1, 1, 4, 4, generator=gen, dtype=torch.float64,
                           requires_grad=True)
        loss_gan(None, fake, "generator").backward()
        eps = 1e-6
        index = (0, 0, 2, 1)
        plus = fake.detach().clone()
        plus[index] += eps
        minus = fake.detach().clone()
        minus[index] -= eps
        numeric = (float(loss_gan(None, plus, "generator"))
                   - float(loss_gan(None, minus, "generator"))) / (2 * eps)
        assert abs(numeric - float(fake.grad[index])) <= 1e-3 * abs(numeric)


class TestCosineSchedule:
    def test_endpoints_and_midpoint(self):
        assert cosine_lr(0, 100, 3e-4, 1e-6) == pytest.approx(3e-4)
        assert cosine_lr(100, 100, 3e-4, 1e-6) == pytest.approx(1e-6)
        assert cosine_lr(50, 100, 3e-4, 1e-6) == pytest.approx((3e-4 + 1e-6) / 2)

    def test_zero_total_rejected(self):
        with pytest.raises(ConfigurationError):
            cosine_lr(0, 0, 1e-3, 1e-6)

    def test_monotone_decreasing(self):
        values = [cosine_lr(t, 20, 1e-3, 1e-6) for t in range(21)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestEma:
    def _linear(self):
        lin = torch.nn.Linear(3, 3)
        return lin

    def test_decay_zero_tracks_params(self):
        lin = self._linear()
        ema = EMAState.from_model(lin, decay=0.0)
        with torch.no_grad():
            lin.weight.fill_(7.0)
        ema_update(ema, lin)
        assert torch.equal(ema.shadow["weight"], lin.weight)

    def test_decay_one_freezes_shadow(self):
        lin = self._linear()
        ema = EMAState.from_model(lin, decay=1.0)
        before = ema.shadow["weight"].clone()
        with torch.no_grad():
            lin.weight.fill_(7.0)
        ema_update(ema, lin)
        assert torch.equal(ema.shadow["weight"], before)

    def test_closed_form_after_k_updates(self):
        lin = self._linear()
        decay = 0.9
        ema = EMAState.from_model(lin, decay=decay)
        start = ema.shadow["weight"].clone()
        with torch.no_grad():
            lin.weight.fill_(2.0)
        for _ in range(5):
            ema_update(ema, lin)
        expected = 2.0 + decay**5 * (start - 2.0)
        assert torch.allclose(ema.shadow["weight"], expected, atol=1e-6)

    def test_shape_mismatch_rejected(self):
        lin = self._linear()
        ema = EMAState.from_model(lin, decay=0.5)
        ema.shadow["weight"] = torch.zeros(2, 2)
        with pytest.raises(ShapeError):
            ema_update(ema, lin)

    def test_bad_decay_rejected(self):
        with pytest.raises(ConfigurationError):
            EMAState({}, decay=1.5)
