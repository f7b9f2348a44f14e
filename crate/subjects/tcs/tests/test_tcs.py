from src.tcs import MockRoom


def test_cold_room_turns_heater_on():
    room = MockRoom(total_time=5, sensor_interval=1, control_interval=1, initial_temp=19)
    states = room.execute_scenario()
    assert any(s.heater_state == 1 for s in states)


def test_warm_room_turns_cooler_on():
    room = MockRoom(total_time=5, sensor_interval=1, control_interval=1, initial_temp=26)
    states = room.execute_scenario()
    assert any(s.cooler_state == 1 for s in states)


def test_one_state_per_second():
    room = MockRoom(total_time=8, sensor_interval=1, control_interval=2)
    assert len(room.execute_scenario()) == 8
