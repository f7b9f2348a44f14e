from hypothesis import given, strategies as st
from src.tcs import MockRoom


# The room temperature never drops below 20 or rises above 24 degrees
@given(initial_temp=st.just(22))
def test_temperature_stays_in_bounds_constant(initial_temp):
    room = MockRoom(10, 1, 1, initial_temp=initial_temp)
    for state in room.execute_scenario():
        assert 20 <= state.temp <= 24
