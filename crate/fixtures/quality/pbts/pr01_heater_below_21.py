from hypothesis import given, strategies as st
from src.tcs import MockRoom


# The heater is switched on once the room is below 21 degrees
@given(
    total_time=st.integers(min_value=5, max_value=40),
    initial_temp=st.integers(min_value=20, max_value=24),
)
def test_heater_on_below_21(total_time, initial_temp):
    room = MockRoom(total_time, 1, 1, initial_temp=initial_temp)
    states = room.execute_scenario()
    for prev, cur in zip(states, states[1:]):
        if prev.temp < 21:
            assert cur.heater_state == 1, f"heater off at {prev.temp}"
