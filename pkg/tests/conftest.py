from hypothesis import HealthCheck, settings

# First calls into the compiled backend pay a JIT toll, so wall-clock
# deadlines are meaningless here; example counts are kept modest instead.
settings.register_profile(
    "xxzgap",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("xxzgap")
