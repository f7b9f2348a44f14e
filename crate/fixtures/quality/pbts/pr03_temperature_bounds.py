from hypothesis import given, strategies as st
from src.tcs import MockRoom


# The room temperature never drops below 20 or rises above 24 degrees
@given(
    total_time=st.integers(min_value=5, max_value=40),
    initial_temp=st.integers(min_value=20, max_value=24),
)
def test_temperature_stays_in_bounds(total_time, initial_temp):
    room = MockRoom(total_time, 1, 1, initial_temp=initial_temp)
    states = room.execute_scenario()
    for state in states:
        assert 20 <= state.temp <= 24, f"temperature out of bounds: {state.temp}"
