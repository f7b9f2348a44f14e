from hypothesis import given, strategies as st


@given(st.integers(min_value=0, max_value=10)
def test_unclosed_decorator(x):
    assert x >= 0
