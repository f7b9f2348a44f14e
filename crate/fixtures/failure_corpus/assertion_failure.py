from hypothesis import given, strategies as st
from src.tcs import MockRoom


@given(initial_temp=st.integers(min_value=20, max_value=24))
def test_heater_never_runs(initial_temp):
    room = MockRoom(20, 1, 1, initial_temp=initial_temp)
    for state in room.execute_scenario():
        assert state.heater_state == 0, f"heater on at {state.temp}"
