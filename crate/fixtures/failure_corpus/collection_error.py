from hypothesis import given, strategies as st
from src.tcs import MockThermostat


@given(st.integers(min_value=20, max_value=24))
def test_thermostat(initial_temp):
    assert MockThermostat(initial_temp).temp == initial_temp
