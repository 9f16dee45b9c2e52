from hypothesis import HealthCheck, settings

# deterministic suite: property tests replay the same example sequence on
# every run so the determinism acceptance criteria are not confounded
settings.register_profile(
    "deterministic",
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")
