"""Named model presets binding architectures to hyperparameter axes.

Every benchmark method is a (connectivity, decoder regularization,
denoising, classifier) tuple plus the grid axes it actually searches.
The regularization weight lam is always 1/C, one shared C across
autoencoder layers and the classifier.
"""

from dataclasses import dataclass

from .autoencoders import AutoencoderSpec, CorruptionSpec
from .deep import DeepConfig, deep_predict, deep_train, hidden_node_count, mlkelm_train
from .shallow import elm_train, kelm_train, rvfl_train
from .shallow import predict as shallow_predict
from .solvers import ElasticNetConfig, KernelSpec, L1Config, RidgeConfig

DEFAULT_PARAMS = {
    "layers": 3,
    "ae_width": 50,
    "clf_width": 500,
    "C": 1.0,
    "sigma": 1.0,  # kernel bandwidth
    "noise": 0.1,  # corruption std for denoising variants
    "alpha_mix": 0.5,
    "activation": "sigmoid",
    "solver_iters": 500,  # FISTA/ADMM budget inside autoencoders
    "max_train_rows": 4096,  # kernel-stack guard
}


@dataclass(frozen=True)
class Method:
    name: str
    family: str  # shallow | deep | kernel_stack
    axes: tuple  # grid axes this method searches
    connectivity: str | None = None
    ae_reg: str | None = None  # l2 | l1 | elastic
    denoise: bool = False
    classifier: str = "rvfl"  # rvfl | elm | kelm


def _deep(name, connectivity, ae_reg, denoise=False):
    axes = ("ae_width", "clf_width", "C")
    if denoise:
        axes += ("noise",)
    return Method(name, "deep", axes, connectivity, ae_reg, denoise,
                  classifier="elm" if connectivity == "plain" else "rvfl")


METHODS = {m.name: m for m in [
    Method("elm", "shallow", ("clf_width", "C"), classifier="elm"),
    Method("rvfl", "shallow", ("clf_width", "C"), classifier="rvfl"),
    Method("kelm", "shallow", ("sigma", "C"), classifier="kelm"),
    Method("ml_kelm", "kernel_stack", ("sigma", "C"), connectivity="plain",
           classifier="kelm"),
    # plain stacks with an ELM readout are the baseline framework
    _deep("helm_l1", "plain", "l1"),
    _deep("helm_l2", "plain", "l2"),
    _deep("helm_elastic", "plain", "elastic"),
    # direct: classifier reads [H_L, X]
    _deep("deep_rvfl_direct_l1", "direct", "l1"),
    _deep("deep_rvfl_direct_l2", "direct", "l2"),
    _deep("deep_rvfl_direct_elastic", "direct", "elastic"),
    # dense: every layer and the classifier read all preceding features
    _deep("deep_rvfl_dense_l1", "dense", "l1"),
    _deep("deep_rvfl_dense_l2", "dense", "l2"),
    _deep("deep_rvfl_dense_elastic", "dense", "elastic"),
    # dense plus the denoising criterion in every autoencoder
    _deep("deep_rvfl_dense_denoise_l1", "dense", "l1", denoise=True),
    _deep("deep_rvfl_dense_denoise_l2", "dense", "l2", denoise=True),
    _deep("deep_rvfl_dense_denoise_elastic", "dense", "elastic", denoise=True),
]}


def get_method(name):
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(
            f"unknown method {name!r}; known methods: {', '.join(sorted(METHODS))}"
        ) from None


def resolve_params(method, params=None):
    merged = dict(DEFAULT_PARAMS)
    merged.update(params or {})
    unknown = set(merged) - set(DEFAULT_PARAMS)
    if unknown:
        raise ValueError(f"unknown params for {method.name}: {sorted(unknown)}")
    return merged


def _decoder_reg(method, lam, params):
    iters = int(params["solver_iters"])
    if method.ae_reg == "l1":
        return L1Config(lam=lam, max_iters=iters, tol=1e-8)
    if method.ae_reg == "elastic":
        return ElasticNetConfig(lam=lam, alpha_mix=params["alpha_mix"],
                                max_iters=iters, tol_primal=1e-8, tol_dual=1e-8)
    return RidgeConfig(lam=lam)


def build_deep_config(method, params, seed):
    lam = 1.0 / params["C"]
    corruption = CorruptionSpec("none")
    if method.denoise:
        corruption = CorruptionSpec("gaussian", sigma=params["noise"])
    layer = AutoencoderSpec(
        width=int(params["ae_width"]),
        reg=_decoder_reg(method, lam, params),
        activation=params["activation"],
        corruption=corruption,
    )
    return DeepConfig(
        layers=[layer] * int(params["layers"]),  # widths tied across layers
        connectivity=method.connectivity,
        classifier=method.classifier,
        clf_width=int(params["clf_width"]),
        clf_lam=lam,
        clf_activation=params["activation"],
        seed=seed,
    )


def train_method(method, params, X, Y, seed):
    """Train one model of the given method at fixed hyperparameters."""
    params = resolve_params(method, params)
    lam = 1.0 / params["C"]
    if method.family == "shallow":
        if method.classifier == "kelm":
            return kelm_train(X, Y, KernelSpec("rbf", sigma=params["sigma"]), lam)
        train = rvfl_train if method.classifier == "rvfl" else elm_train
        return train(X, Y, int(params["clf_width"]), lam, seed,
                     params["activation"])
    if method.family == "kernel_stack":
        spec = KernelSpec("rbf", sigma=params["sigma"])
        L = int(params["layers"])
        return mlkelm_train(X, Y, [spec] * L, [lam] * L, spec, lam,
                            max_train_rows=int(params["max_train_rows"]),
                            seed=seed)
    return deep_train(X, Y, build_deep_config(method, params, seed))


def predict_method(model, X):
    if hasattr(model, "encoders"):
        return deep_predict(model, X)
    return shallow_predict(model, X)


def hidden_nodes(method, params):
    """Total hidden nodes at the given hyperparameters; kernel maps count 0."""
    params = resolve_params(method, params)
    if method.family == "kernel_stack":
        return 0
    if method.family == "shallow":
        return 0 if method.classifier == "kelm" else int(params["clf_width"])
    return int(params["layers"]) * int(params["ae_width"]) + int(params["clf_width"])


def model_hidden_nodes(model):
    if hasattr(model, "encoders"):
        return hidden_node_count(model)
    return model.layer.width if model.layer is not None else 0
